//! Compile typed feature structure grammars into definite clause programs.

pub mod classifier;
pub mod cli;
pub mod compiler;
pub mod descriptions;
pub mod fstruct;
pub mod grammars;
pub mod interpreter;
pub mod signature;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/signatures.md")]
    mod signatures {}
    #[doc = include_str!("../../../book/src/descriptions.md")]
    mod descriptions {}
    #[doc = include_str!("../../../book/src/feature_structures.md")]
    mod feature_structures {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/compilation.md")]
    mod compilation {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/checking.md")]
    mod checking {}
    #[doc = include_str!("../../../book/src/command_line.md")]
    mod command_line {}
}
