//! Grammars bundled with the crate, used by the examples, tests and guide.

/// Lists with a constraint-based `append_c`.
pub const APPEND_C: &str = include_str!("../grammars/append_c.gram");

/// Types `a`, `b`, `c` whose features `F` and `G` must share a value.
pub const SHARED_VALUES: &str = include_str!("../grammars/shared_values.gram");

/// A small sentence grammar with `phrase`, `word` and `append`.
pub const SENTENCES: &str = include_str!("../grammars/sentences.gram");

/// A constraint-free signature.
pub const EMPTY: &str = include_str!("../grammars/empty.gram");

/// A diamond-shaped hierarchy with constraints on both parents.
pub const DIAMOND: &str = include_str!("../grammars/diamond.gram");

/// Every bundled grammar with its file name.
pub const ALL: [(&str, &str); 5] = [
    ("append_c.gram", APPEND_C),
    ("shared_values.gram", SHARED_VALUES),
    ("sentences.gram", SENTENCES),
    ("empty.gram", EMPTY),
    ("diamond.gram", DIAMOND),
];
