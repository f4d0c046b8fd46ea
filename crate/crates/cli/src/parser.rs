//! Script grammar:
//!
//! ```text
//! stmt   := "chart" NAME "(" names ["|" names] ")"
//!         | ("function" | "vector" | "bivector" | "multivector" | "tensor" | "form")
//!              NAME "on" NAME ["degree" INT] "=" expr
//!         | "jacobi" NAME "on" NAME "=" "(" expr "," expr ")"
//!         | "bidiff" NAME "on" NAME "=" "(" expr "," expr "," expr "," expr ")"
//!         | "algebroid" NAME "on" NAME "rank" INT "{" entry {sep entry} "}"
//!         | "algebroid" NAME "=" PRESET "(" NAME ")"
//!         | "cocycle" NAME "on" NAME "=" expr
//!         | "section" NAME "on" NAME ["degree" INT] "=" expr
//!         | "check" SUITE {NAME | INT}
//!         | "lift" KIND NAME ["in" NAME]
//!         | "bracket" KIND NAME NAME ["in" NAME]
//!         | "print" NAME
//! entry  := "[" FRAME "," FRAME "]" "=" expr | "rho" "(" FRAME ")" "=" expr
//! expr   := term {("+" | "-") term}
//! term   := unary {("*" | "/" | "^" | "@") unary}
//! unary  := "-" unary | power
//! power  := atom {"^" INT}
//! atom   := INT | NAME | "exp" "(" expr ")" | "d/d"NAME | "e*"INT | "(" expr ")"
//! ```
//!
//! `^` followed by an integer literal is a power; otherwise it is the
//! wedge product. `@` is the tensor product.

use crate::lexer::{tokenize, Pos, SyntaxError, Tok, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64, Pos),
    Name(String, Pos),
    Vector(String, Pos),
    Coframe(usize, Pos),
    Exp(Box<Expr>, Pos),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, u32, Pos),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Int(_, p)
            | Expr::Name(_, p)
            | Expr::Vector(_, p)
            | Expr::Coframe(_, p)
            | Expr::Exp(_, p)
            | Expr::Bin(_, _, _, p)
            | Expr::Pow(_, _, p) => *p,
            Expr::Neg(e) => e.pos(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjKind {
    Function,
    Vector,
    Bivector,
    Multivector,
    Tensor,
    Form,
    Section,
}

impl ObjKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ObjKind::Function => "function",
            ObjKind::Vector => "vector",
            ObjKind::Bivector => "bivector",
            ObjKind::Multivector => "multivector",
            ObjKind::Tensor => "tensor",
            ObjKind::Form => "form",
            ObjKind::Section => "section",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "function" => ObjKind::Function,
            "vector" => ObjKind::Vector,
            "bivector" => ObjKind::Bivector,
            "multivector" => ObjKind::Multivector,
            "tensor" => ObjKind::Tensor,
            "form" => ObjKind::Form,
            "section" => ObjKind::Section,
            _ => return None,
        })
    }
}

/// A name together with where it was written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebroidEntry {
    /// `[e_i, e_j] = expr` (0-based indices)
    Bracket(usize, usize, Expr),
    /// `rho(e_i) = expr`
    Anchor(usize, Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Chart {
        name: Name,
        vars: Vec<Name>,
        aux: Vec<Name>,
    },
    Object {
        kind: ObjKind,
        name: Name,
        on: Name,
        degree: Option<usize>,
        expr: Expr,
    },
    Jacobi {
        name: Name,
        on: Name,
        lambda: Expr,
        gamma: Expr,
    },
    BiDiff {
        name: Name,
        on: Name,
        parts: [Expr; 4],
    },
    Algebroid {
        name: Name,
        on: Name,
        rank: usize,
        entries: Vec<AlgebroidEntry>,
    },
    Preset {
        name: Name,
        preset: Name,
        chart: Name,
    },
    Cocycle {
        name: Name,
        on: Name,
        expr: Expr,
    },
    Check {
        suite: Name,
        args: Vec<Name>,
    },
    Lift {
        kind: Name,
        target: Name,
        within: Option<Name>,
    },
    Bracket {
        kind: Name,
        first: Name,
        second: Name,
        within: Option<Name>,
    },
    Print {
        name: Name,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

impl Stmt {
    /// True for statements that bind a name.
    pub fn is_definition(&self) -> bool {
        !matches!(
            self.kind,
            StmtKind::Check { .. } | StmtKind::Lift { .. } | StmtKind::Bracket { .. } | StmtKind::Print { .. }
        )
    }

    /// Commands rendered back to their canonical one-line form.
    pub fn command_text(&self) -> String {
        match &self.kind {
            StmtKind::Check { suite, args } => {
                let mut s = format!("check {}", suite.text);
                for a in args {
                    s.push(' ');
                    s.push_str(&a.text);
                }
                s
            }
            StmtKind::Lift { kind, target, within } => {
                let mut s = format!("lift {} {}", kind.text, target.text);
                if let Some(w) = within {
                    s.push_str(&format!(" in {}", w.text));
                }
                s
            }
            StmtKind::Bracket {
                kind,
                first,
                second,
                within,
            } => {
                let mut s = format!("bracket {} {} {}", kind.text, first.text, second.text);
                if let Some(w) = within {
                    s.push_str(&format!(" in {}", w.text));
                }
                s
            }
            StmtKind::Print { name } => format!("print {}", name.text),
            _ => String::new(),
        }
    }
}

const STATEMENTS: &[&str] = &[
    "chart",
    "function",
    "vector",
    "bivector",
    "multivector",
    "tensor",
    "form",
    "section",
    "jacobi",
    "bidiff",
    "algebroid",
    "cocycle",
    "check",
    "lift",
    "bracket",
    "print",
];

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(SyntaxError {
            pos: t.pos,
            message: format!("unexpected {}", t.tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == w)
    }

    fn sym(&mut self, c: char) -> PResult<Pos> {
        if self.is_sym(c) {
            Ok(self.bump().pos)
        } else {
            self.error(&[&format!("`{c}`")])
        }
    }

    fn word(&mut self, w: &str) -> PResult<Pos> {
        if self.is_word(w) {
            Ok(self.bump().pos)
        } else {
            self.error(&[&format!("`{w}`")])
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let text = s.clone();
                let pos = self.bump().pos;
                Ok(Name { text, pos })
            }
            _ => self.error(&["a name"]),
        }
    }

    fn int(&mut self) -> PResult<u64> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error(&["an integer"]),
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.bump();
        }
    }

    fn end_of_statement(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::Newline | Tok::Eof => Ok(()),
            Tok::Sym(';') => {
                self.bump();
                Ok(())
            }
            _ => self.error(&["end of line"]),
        }
    }

    fn script(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            self.skip_newlines();
            if self.peek().tok == Tok::Eof {
                return Ok(out);
            }
            out.push(self.statement()?);
            self.end_of_statement()?;
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let pos = self.peek().pos;
        let kw = match &self.peek().tok {
            Tok::Ident(s) if STATEMENTS.contains(&s.as_str()) => s.clone(),
            _ => return self.error(STATEMENTS),
        };
        self.bump();
        let kind = match kw.as_str() {
            "chart" => self.chart()?,
            "jacobi" => {
                let (name, on) = self.header()?;
                self.sym('=')?;
                self.sym('(')?;
                let lambda = self.expr()?;
                self.sym(',')?;
                let gamma = self.expr()?;
                self.sym(')')?;
                StmtKind::Jacobi {
                    name,
                    on,
                    lambda,
                    gamma,
                }
            }
            "bidiff" => {
                let (name, on) = self.header()?;
                self.sym('=')?;
                self.sym('(')?;
                let a = self.expr()?;
                self.sym(',')?;
                let b = self.expr()?;
                self.sym(',')?;
                let c = self.expr()?;
                self.sym(',')?;
                let d = self.expr()?;
                self.sym(')')?;
                StmtKind::BiDiff {
                    name,
                    on,
                    parts: [a, b, c, d],
                }
            }
            "algebroid" => self.algebroid()?,
            "cocycle" => {
                let (name, on) = self.header()?;
                self.sym('=')?;
                StmtKind::Cocycle {
                    name,
                    on,
                    expr: self.expr()?,
                }
            }
            "check" => {
                let suite = self.name()?;
                let mut args = Vec::new();
                loop {
                    match &self.peek().tok {
                        Tok::Ident(s) => {
                            let text = s.clone();
                            let pos = self.bump().pos;
                            args.push(Name { text, pos });
                        }
                        Tok::Int(n) => {
                            let text = n.to_string();
                            let pos = self.bump().pos;
                            args.push(Name { text, pos });
                        }
                        _ => break,
                    }
                }
                StmtKind::Check { suite, args }
            }
            "lift" => {
                let kind = self.name()?;
                let target = self.name()?;
                let within = self.within()?;
                StmtKind::Lift { kind, target, within }
            }
            "bracket" => {
                let kind = self.name()?;
                let first = self.name()?;
                let second = self.name()?;
                let within = self.within()?;
                StmtKind::Bracket {
                    kind,
                    first,
                    second,
                    within,
                }
            }
            "print" => StmtKind::Print { name: self.name()? },
            other => {
                let kind = ObjKind::from_keyword(other).expect("statement keyword");
                let (name, on) = self.header()?;
                let degree = if self.is_word("degree") {
                    self.bump();
                    Some(self.int()? as usize)
                } else if self.is_sym('=') {
                    None
                } else {
                    return self.error(&["`degree`", "`=`"]);
                };
                self.sym('=')?;
                StmtKind::Object {
                    kind,
                    name,
                    on,
                    degree,
                    expr: self.expr()?,
                }
            }
        };
        Ok(Stmt { kind, pos })
    }

    fn within(&mut self) -> PResult<Option<Name>> {
        if self.is_word("in") {
            self.bump();
            Ok(Some(self.name()?))
        } else {
            Ok(None)
        }
    }

    fn header(&mut self) -> PResult<(Name, Name)> {
        let name = self.name()?;
        self.word("on")?;
        Ok((name, self.name()?))
    }

    fn chart(&mut self) -> PResult<StmtKind> {
        let name = self.name()?;
        self.sym('(')?;
        let mut vars = Vec::new();
        let mut aux = Vec::new();
        let mut in_aux = false;
        if !self.is_sym(')') {
            loop {
                let n = self.name()?;
                if in_aux {
                    aux.push(n);
                } else {
                    vars.push(n);
                }
                if self.is_sym(',') {
                    self.bump();
                } else if self.is_sym('|') && !in_aux {
                    self.bump();
                    in_aux = true;
                } else if self.is_sym(')') {
                    break;
                } else if in_aux {
                    return self.error(&["`,`", "`)`"]);
                } else {
                    return self.error(&["`,`", "`|`", "`)`"]);
                }
            }
        }
        self.sym(')')?;
        Ok(StmtKind::Chart { name, vars, aux })
    }

    fn frame_index(&mut self) -> PResult<usize> {
        let t = self.peek().clone();
        if let Tok::Ident(s) = &t.tok {
            if let Some(i) = s.strip_prefix('e').and_then(|d| d.parse::<usize>().ok()) {
                if i >= 1 {
                    self.bump();
                    return Ok(i - 1);
                }
            }
        }
        self.error(&["a frame element `e1`, `e2`, ..."])
    }

    fn algebroid(&mut self) -> PResult<StmtKind> {
        let name = self.name()?;
        if self.is_sym('=') {
            self.bump();
            let preset = self.name()?;
            self.sym('(')?;
            let chart = self.name()?;
            self.sym(')')?;
            return Ok(StmtKind::Preset { name, preset, chart });
        }
        if !self.is_word("on") {
            return self.error(&["`on`", "`=`"]);
        }
        self.bump();
        let on = self.name()?;
        self.word("rank")?;
        let rank = self.int()? as usize;
        self.sym('{')?;
        let mut entries = Vec::new();
        loop {
            while self.is_sym(';') || self.peek().tok == Tok::Newline {
                self.bump();
            }
            if self.is_sym('}') {
                self.bump();
                break;
            }
            if self.is_sym('[') {
                self.bump();
                let i = self.frame_index()?;
                self.sym(',')?;
                let j = self.frame_index()?;
                self.sym(']')?;
                self.sym('=')?;
                entries.push(AlgebroidEntry::Bracket(i, j, self.expr()?));
            } else if self.is_word("rho") {
                self.bump();
                self.sym('(')?;
                let i = self.frame_index()?;
                self.sym(')')?;
                self.sym('=')?;
                entries.push(AlgebroidEntry::Anchor(i, self.expr()?));
            } else {
                return self.error(&["`[`", "`rho`", "`}`"]);
            }
            if !(self.is_sym(';') || self.is_sym('}') || self.peek().tok == Tok::Newline) {
                return self.error(&["`;`", "end of line", "`}`"]);
            }
        }
        Ok(StmtKind::Algebroid {
            name,
            on,
            rank,
            entries,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym(c @ ('+' | '-')) => c,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym(c @ ('*' | '/' | '^' | '@')) => c,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.is_sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let mut base = self.atom()?;
        while self.is_sym('^') {
            if let Tok::Int(n) = *self.peek_at(1) {
                let pos = self.bump().pos;
                self.bump();
                let n = u32::try_from(n).map_err(|_| SyntaxError {
                    pos,
                    message: "exponent too large".into(),
                    expected: Vec::new(),
                })?;
                base = Expr::Pow(Box::new(base), n, pos);
            } else {
                break;
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n, t.pos))
            }
            Tok::Vector(s) => {
                self.bump();
                Ok(Expr::Vector(s, t.pos))
            }
            Tok::Coframe(i) => {
                self.bump();
                Ok(Expr::Coframe(i, t.pos))
            }
            Tok::Ident(s) if s == "exp" && *self.peek_at(1) == Tok::Sym('(') => {
                self.bump();
                self.bump();
                let e = self.expr()?;
                self.sym(')')?;
                Ok(Expr::Exp(Box::new(e), t.pos))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Name(s, t.pos))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.sym(')')?;
                Ok(e)
            }
            _ => self.error(&["a number", "a name", "`d/d<name>`", "`e*<n>`", "`(`", "`-`"]),
        }
    }
}

/// Parses a whole script, stopping at the first error.
pub fn parse(src: &str) -> Result<Vec<Stmt>, SyntaxError> {
    let toks = tokenize(src)?;
    Parser { toks, i: 0 }.script()
}
