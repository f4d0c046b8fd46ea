use std::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    /// `d/dx`
    Vector(String),
    /// `e*3`
    Coframe(usize),
    Sym(char),
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Vector(s) => format!("`d/d{s}`"),
            Tok::Coframe(i) => format!("`e*{i}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Lexical or syntactic error with the set of acceptable tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

const SYMBOLS: &str = "()[]{},;=+-*/^@|";

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits a script into tokens. Newlines inside `()` and `[]` are
/// dropped so expressions may span lines; `#` starts a comment.
pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut depth = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let rest = &chars[i..];
        let starts = |s: &str| s.chars().zip(rest.iter()).filter(|(a, b)| a == *b).count() == s.len();
        if c == '\n' {
            if depth == 0 {
                out.push(Token { tok: Tok::Newline, pos });
            }
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = if starts("d/d") && rest.len() > 3 && ident_start(rest[3]) {
            let mut n = 3;
            while n < rest.len() && ident_char(rest[n]) {
                n += 1;
            }
            (Tok::Vector(rest[3..n].iter().collect()), n)
        } else if starts("e*") && rest.len() > 2 && rest[2].is_ascii_digit() {
            let mut n = 2;
            while n < rest.len() && rest[n].is_ascii_digit() {
                n += 1;
            }
            let digits: String = rest[2..n].iter().collect();
            (Tok::Coframe(digits.parse().map_err(|_| bad_number(pos))?), n)
        } else if ident_start(c) {
            let mut n = 1;
            while n < rest.len() && ident_char(rest[n]) {
                n += 1;
            }
            (Tok::Ident(rest[..n].iter().collect()), n)
        } else if c.is_ascii_digit() {
            let mut n = 1;
            while n < rest.len() && rest[n].is_ascii_digit() {
                n += 1;
            }
            let digits: String = rest[..n].iter().collect();
            (Tok::Int(digits.parse().map_err(|_| bad_number(pos))?), n)
        } else if SYMBOLS.contains(c) {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth = depth.saturating_sub(1),
                _ => {}
            }
            (Tok::Sym(c), 1)
        } else {
            return Err(SyntaxError {
                pos,
                message: format!("unexpected character `{c}`"),
                expected: Vec::new(),
            });
        };
        out.push(Token { tok, pos });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

fn bad_number(pos: Pos) -> SyntaxError {
    SyntaxError {
        pos,
        message: "number too large".into(),
        expected: Vec::new(),
    }
}
