//! The `tfsc` command line.
//!
//! ```text
//! tfsc compile <file> [--dump-classes] [--dump-program] [--naive]
//! tfsc query <file> -e <description> [--depth N] [--max-solutions N] [--suppress f1,f2] [--naive]
//! tfsc repl <file> [--depth N] [--max-solutions N] [--suppress f1,f2] [--naive]
//! ```
//!
//! Exit status: 0 on success, 1 when a query has no solution or the grammar
//! fails to compile, 2 for usage errors, unreadable files and parse errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::compiler::{compile_naive, compile_program, Program};
use crate::descriptions::{parse_description, parse_grammar, Grammar};
use crate::fstruct::{print_avm, PrintOptions};
use crate::interpreter::{query, QueryOptions, SearchStatus};

#[derive(Debug, Parser)]
#[command(name = "tfsc", version, about = "Compile and query typed feature structure grammars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a grammar and optionally show its classification or program.
    Compile {
        file: PathBuf,
        #[arg(long)]
        dump_classes: bool,
        #[arg(long)]
        dump_program: bool,
        /// Use the direct encoding with run-time inheritance.
        #[arg(long)]
        naive: bool,
    },
    /// Print the solutions of one query.
    Query {
        file: PathBuf,
        #[arg(short = 'e', long = "expr", value_name = "DESCRIPTION")]
        expr: String,
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Read queries interactively; `;` asks for the next solution.
    Repl {
        file: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
    },
}

#[derive(Debug, Args)]
struct SessionArgs {
    /// Maximum number of nested clause resolutions.
    #[arg(long = "depth", value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    depth: Option<u64>,
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    max_solutions: Option<u64>,
    /// Features to leave out of printed results.
    #[arg(long, value_delimiter = ',', value_name = "FEATURES")]
    suppress: Vec<String>,
    #[arg(long)]
    naive: bool,
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

/// Run the command line and return the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<Grammar, Failure> {
    let source = std::fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    parse_grammar(&source).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn compile(g: &Grammar, naive: bool, stderr: &mut dyn Write) -> Result<Program, Failure> {
    let program = if naive { compile_naive(g) } else { compile_program(g) }.map_err(|e| fail(1, e))?;
    for w in program.warnings() {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(program)
}

fn dispatch(
    command: Command,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let io = |e: std::io::Error| fail(1, e);
    match command {
        Command::Compile { file, dump_classes, dump_program, naive } => {
            let g = load(&file)?;
            let program = compile(&g, naive, stderr)?;
            if dump_classes {
                let cls = crate::classifier::classify(&g);
                write!(stdout, "{}", cls.dump(g.signature())).map_err(io)?;
            }
            if dump_program {
                write!(stdout, "{}", program.dump()).map_err(io)?;
            }
            Ok(0)
        }
        Command::Query { file, expr, session } => {
            let g = load(&file)?;
            let program = compile(&g, session.naive, stderr)?;
            let session = Session::new(&program, &session)?;
            let d = parse_description(g.signature(), &expr).map_err(|e| fail(2, e))?;
            let mut q = query(&program, &d, session.opts.clone()).map_err(|e| fail(1, e))?;
            let mut found = 0;
            for s in q.by_ref() {
                found += 1;
                writeln!(stdout, "{}", session.render(&s.fs)).map_err(io)?;
            }
            session.report(q.status(), stderr);
            if found == 0 {
                writeln!(stdout, "no").map_err(io)?;
                return Ok(1);
            }
            Ok(0)
        }
        Command::Repl { file, session } => {
            let g = load(&file)?;
            let program = compile(&g, session.naive, stderr)?;
            let session = Session::new(&program, &session)?;
            session.repl(stdin, stdout, stderr).map_err(io)?;
            Ok(0)
        }
    }
}

struct Session<'p> {
    program: &'p Program,
    opts: QueryOptions,
    print: PrintOptions,
    depth: Option<usize>,
}

impl<'p> Session<'p> {
    fn new(program: &'p Program, args: &SessionArgs) -> Result<Self, Failure> {
        let sig = program.signature();
        let mut suppress = BTreeSet::new();
        for name in args.suppress.iter().filter(|s| !s.is_empty()) {
            let f = sig.feature_id(name).ok_or_else(|| fail(2, format!("unknown feature `{name}` in --suppress")))?;
            suppress.insert(f);
        }
        let depth = args.depth.map(|d| d as usize);
        let opts = QueryOptions {
            max_solutions: args.max_solutions.map(|m| m as usize),
            depth_bound: depth,
            ..QueryOptions::default()
        };
        Ok(Session { program, opts, print: PrintOptions { suppress, ..PrintOptions::default() }, depth })
    }

    fn render(&self, fs: &crate::fstruct::FeatureStructure) -> String {
        print_avm(self.program.signature(), fs, &self.print).text
    }

    fn report(&self, status: SearchStatus, stderr: &mut dyn Write) {
        if status == SearchStatus::DepthLimitExceeded {
            let _ =
                writeln!(stderr, "warning: depth bound {} reached; some derivations were cut", self.depth.unwrap_or(0));
        }
    }

    fn repl(&self, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> std::io::Result<()> {
        let sig = self.program.signature();
        let mut current = None;
        let mut line = String::new();
        loop {
            write!(stdout, "Query> ")?;
            stdout.flush()?;
            line.clear();
            if stdin.read_line(&mut line)? == 0 {
                writeln!(stdout)?;
                return Ok(());
            }
            let input = line.trim();
            match input {
                "" => continue,
                "quit" | "halt" | "halt." => return Ok(()),
                ";" => {
                    if current.is_none() {
                        writeln!(stdout, "no")?;
                        continue;
                    }
                }
                _ => match parse_description(sig, input) {
                    Ok(d) => match query(self.program, &d, self.opts.clone()) {
                        Ok(q) => current = Some(q),
                        Err(e) => {
                            writeln!(stderr, "error: {e}")?;
                            continue;
                        }
                    },
                    Err(e) => {
                        writeln!(stderr, "error: {e}")?;
                        continue;
                    }
                },
            }
            let q = current.as_mut().unwrap();
            match q.next() {
                Some(s) => writeln!(stdout, "Result> {}", self.render(&s.fs))?,
                None => {
                    self.report(q.status(), stderr);
                    writeln!(stdout, "no")?;
                    current = None;
                }
            }
        }
    }
}
