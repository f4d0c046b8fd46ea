//! Script language and command-line front end for `liftlab`.

pub mod lexer;
pub mod parser;
pub mod session;

pub use parser::parse;
pub use session::{Object, Outcome, Output, ScriptError, Session};

/// Output format of the command-line tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => {
                serde_json::to_string_pretty(&self.to_json()).expect("outcome serializes") + "\n"
            }
        }
    }
}

/// Runs a script in a fresh session.
pub fn run_source(src: &str, seed: u64) -> Outcome {
    Session::new(seed).run_script(src)
}
