//! Evaluation of parsed scripts: named bindings, commands and their
//! rendered outputs.

use std::collections::HashMap;
use std::fmt;

use liftlab::algebroid::{AlgebroidSpec, JacobiAlgebroidSpec};
use liftlab::calculus::{deformed_schouten_jacobi, schouten, schouten_in, schouten_jacobi_first_order};
use liftlab::coeff::ExpPoly;
use liftlab::geometry::skew::frame_labels;
use liftlab::geometry::{
    BundleChart, Chart, ChartRef, CovariantField, FirstOrderBiDiffOp, MultiVector, PolyDiffOp, Role,
    TensorField, Variable,
};
use liftlab::lifts::{
    complete_lift, complete_lift_tangent, function_complete_lift, jacobi_lift, jacobi_lift_algebroid, p_phi,
    poisson_lift, poisson_lift_algebroid, poissonization,
};
use liftlab::verify::{
    battery, jacobi_residuals, lemma_first_order_suite, lemma_jacobi_algebroid_suite, theorem10_suite,
    theorem6_suite, theorem7_suite, theorem8_suite, LemmaOptions, Report, Theorem6Witness,
};

use crate::lexer::{Pos, SyntaxError};
use crate::parser::{parse, AlgebroidEntry, Expr, Name, ObjKind, Stmt, StmtKind};

/// Default number of random inputs per law for `check battery`.
pub const DEFAULT_BATTERY_COUNT: usize = 30;

/// A parse or evaluation failure with its source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptError {
    pub pos: Pos,
    pub message: String,
    /// Acceptable tokens; empty for evaluation errors.
    pub expected: Vec<String>,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl From<SyntaxError> for ScriptError {
    fn from(e: SyntaxError) -> Self {
        ScriptError {
            pos: e.pos,
            message: e.message,
            expected: e.expected,
        }
    }
}

type RResult<T> = Result<T, ScriptError>;

fn err<T>(pos: Pos, message: impl Into<String>) -> RResult<T> {
    Err(ScriptError {
        pos,
        message: message.into(),
        expected: Vec::new(),
    })
}

trait At<T> {
    fn at(self, pos: Pos) -> RResult<T>;
}

impl<T> At<T> for liftlab::Result<T> {
    fn at(self, pos: Pos) -> RResult<T> {
        self.or_else(|e| err(pos, e.to_string()))
    }
}

/// A bound object. `on` names the chart or algebroid it lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Chart(ChartRef),
    Function { on: String, value: ExpPoly },
    Field { kind: ObjKind, on: String, value: MultiVector },
    Tensor { on: String, value: TensorField },
    Form { on: String, value: CovariantField },
    Operator { on: String, value: FirstOrderBiDiffOp },
    Algebroid { on: String, spec: AlgebroidSpec },
    Cocycle { on: String, spec: JacobiAlgebroidSpec },
}

impl Object {
    fn describe(&self) -> &'static str {
        match self {
            Object::Chart(_) => "a chart",
            Object::Function { .. } => "a function",
            Object::Field { .. } => "a multivector",
            Object::Tensor { .. } => "a tensor",
            Object::Form { .. } => "a form",
            Object::Operator { .. } => "an operator",
            Object::Algebroid { .. } => "an algebroid",
            Object::Cocycle { .. } => "a Jacobi algebroid",
        }
    }
}

/// Result of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Output {
    Report { command: String, line: usize, report: Report },
    Value { command: String, line: usize, text: String },
    /// Canonical statement of a binding, from `print`.
    Statement { line: usize, text: String },
}

impl Output {
    /// Failed reports and reports whose equivalence pattern is broken.
    pub fn passed(&self) -> bool {
        match self {
            Output::Report { report, .. } => report.all_passed() && report.equivalences_hold(),
            Output::Value { .. } | Output::Statement { .. } => true,
        }
    }

    pub fn render_text(&self) -> String {
        match self {
            Output::Report { command, report, .. } => format!("{command}\n{}", report.render_text()),
            Output::Value { command, text, .. } => format!("{command} = {text}\n"),
            Output::Statement { text, .. } => format!("{text}\n"),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Output::Report { command, line, report } => serde_json::json!({
                "command": command,
                "line": line,
                "report": report.to_json(),
            }),
            Output::Value { command, line, text } => serde_json::json!({
                "command": command,
                "line": line,
                "value": text,
            }),
            Output::Statement { line, text } => serde_json::json!({
                "line": line,
                "statement": text,
            }),
        }
    }
}

/// Everything a script produced, up to the first error.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<Output>,
    pub error: Option<ScriptError>,
}

impl Outcome {
    pub fn all_passed(&self) -> bool {
        self.outputs.iter().all(Output::passed)
    }

    /// 0 when everything passed, 1 when a check failed, 2 on errors.
    pub fn exit_code(&self) -> u8 {
        if self.error.is_some() {
            2
        } else if self.all_passed() {
            0
        } else {
            1
        }
    }

    /// Output blocks separated by blank lines.
    pub fn render_text(&self) -> String {
        self.outputs
            .iter()
            .map(Output::render_text)
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "outputs": self.outputs.iter().map(Output::to_json).collect::<Vec<_>>(),
            "all_passed": self.all_passed(),
        });
        if let Some(e) = &self.error {
            v["error"] = serde_json::json!({
                "line": e.pos.line,
                "column": e.pos.col,
                "message": e.message,
                "expected": e.expected,
            });
        }
        v
    }
}

/// Ordered name bindings plus the seed for randomized batteries.
#[derive(Clone, Debug, Default)]
pub struct Session {
    names: Vec<String>,
    objects: HashMap<String, Object>,
    pub seed: u64,
}

/// Value of a subexpression.
#[derive(Clone, Debug)]
enum Value {
    Poly(ExpPoly),
    Multi(MultiVector),
    Form(CovariantField),
    Tensor(TensorField),
}

impl Value {
    fn describe(&self) -> String {
        match self {
            Value::Poly(_) => "a function".into(),
            Value::Multi(m) => format!("a degree-{} multivector", m.degree()),
            Value::Form(f) => format!("a degree-{} form", f.degree()),
            Value::Tensor(t) => format!("a degree-{} tensor", t.degree()),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Value::Poly(p) => p.is_zero(),
            Value::Multi(m) => m.is_zero(),
            Value::Form(f) => f.is_zero(),
            Value::Tensor(t) => t.is_zero(),
        }
    }
}

/// Where an expression is evaluated: the coordinate frame of a chart, or
/// the abstract frame `e1..er` of an algebroid over that chart.
struct Ctx {
    chart: ChartRef,
    /// Chart or algebroid name; bound objects on the same target resolve.
    on: String,
    frame: Option<usize>,
}

impl Ctx {
    fn rank(&self) -> usize {
        self.frame.unwrap_or(self.chart.dim())
    }
}

fn frame_index(name: &str, rank: usize) -> Option<usize> {
    let i: usize = name.strip_prefix('e')?.parse().ok()?;
    (1..=rank).contains(&i).then(|| i - 1)
}

fn coframe_labels(rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("e*{i}")).collect()
}

/// `m` rendered over the coordinate frame, or over `e1..er` on an algebroid.
fn render_multi(m: &MultiVector, framed: bool) -> String {
    if framed {
        m.render_with(&frame_labels(m.rank()))
    } else {
        m.render()
    }
}

fn render_form(f: &CovariantField, framed: bool) -> String {
    if framed {
        f.render_with(&coframe_labels(f.rank()))
    } else {
        f.render()
    }
}

/// Skew tensors render as multivectors.
fn render_tensor(t: &TensorField) -> String {
    match t.to_multivector() {
        Ok(m) if t.is_skew() => m.render(),
        _ => t.render(),
    }
}

/// Skew operators render as the pair `(L, G)`, others as `(T, G1, G2, a)`.
fn render_operator(j: &FirstOrderBiDiffOp) -> String {
    match j.as_skew() {
        Some((l, g)) => format!("({}, {})", l.render(), g.render()),
        None => j.render(),
    }
}

fn sum(a: Value, b: Value, pos: Pos) -> RResult<Value> {
    if b.is_zero() && matches!(b, Value::Poly(_)) {
        return Ok(a);
    }
    if a.is_zero() && matches!(a, Value::Poly(_)) {
        return Ok(b);
    }
    Ok(match (a, b) {
        (Value::Poly(p), Value::Poly(q)) => Value::Poly(&p + &q),
        (Value::Poly(p), Value::Multi(m)) | (Value::Multi(m), Value::Poly(p)) if m.degree() == 0 => {
            Value::Multi(m.plus(&MultiVector::scalar(m.chart(), m.rank(), p)))
        }
        (Value::Poly(p), Value::Form(m)) | (Value::Form(m), Value::Poly(p)) if m.degree() == 0 => {
            Value::Form(m.plus(&CovariantField::scalar(m.chart(), m.rank(), p)))
        }
        (Value::Multi(x), Value::Multi(y)) => {
            if y.is_zero() && x.degree() != y.degree() {
                Value::Multi(x)
            } else if x.is_zero() && x.degree() != y.degree() {
                Value::Multi(y)
            } else {
                Value::Multi(x.try_add(&y).at(pos)?)
            }
        }
        (Value::Form(x), Value::Form(y)) => Value::Form(x.try_add(&y).at(pos)?),
        (Value::Tensor(x), Value::Tensor(y)) => Value::Tensor(x.try_add(&y).at(pos)?),
        (Value::Tensor(x), Value::Multi(y)) => Value::Tensor(x.try_add(&y.expand()).at(pos)?),
        (Value::Multi(x), Value::Tensor(y)) => Value::Tensor(x.expand().try_add(&y).at(pos)?),
        (a, b) => return err(pos, format!("cannot add {} and {}", a.describe(), b.describe())),
    })
}

fn negate(v: Value) -> Value {
    match v {
        Value::Poly(p) => Value::Poly(-p),
        Value::Multi(m) => Value::Multi(m.neg()),
        Value::Form(f) => Value::Form(f.neg()),
        Value::Tensor(t) => Value::Tensor(t.neg()),
    }
}

fn scale(v: Value, f: &ExpPoly) -> Value {
    match v {
        Value::Poly(p) => Value::Poly(&p * f),
        Value::Multi(m) => Value::Multi(m.scale(f)),
        Value::Form(m) => Value::Form(m.scale(f)),
        Value::Tensor(t) => Value::Tensor(t.scale(f)),
    }
}

fn product(a: Value, b: Value, pos: Pos) -> RResult<Value> {
    match (a, b) {
        (Value::Poly(p), v) | (v, Value::Poly(p)) => Ok(scale(v, &p)),
        (a, b) => err(
            pos,
            format!("cannot multiply {} by {}; use `^` or `@`", a.describe(), b.describe()),
        ),
    }
}

fn wedge(a: Value, b: Value, pos: Pos) -> RResult<Value> {
    match (a, b) {
        (Value::Poly(p), v) | (v, Value::Poly(p)) => Ok(scale(v, &p)),
        (Value::Multi(x), Value::Multi(y)) => Ok(Value::Multi(x.wedge(&y).at(pos)?)),
        (Value::Form(x), Value::Form(y)) => Ok(Value::Form(x.wedge(&y).at(pos)?)),
        (a, b) => err(pos, format!("cannot wedge {} with {}", a.describe(), b.describe())),
    }
}

fn as_tensor(v: Value, pos: Pos) -> RResult<TensorField> {
    match v {
        Value::Tensor(t) => Ok(t),
        Value::Multi(m) => Ok(m.expand()),
        other => err(pos, format!("cannot take the tensor product of {}", other.describe())),
    }
}

fn tensor_product(a: Value, b: Value, pos: Pos) -> RResult<Value> {
    if let (Value::Poly(p), v) | (v, Value::Poly(p)) = (a.clone(), b.clone()) {
        return Ok(scale(v, &p));
    }
    let (x, y) = (as_tensor(a, pos)?, as_tensor(b, pos)?);
    Ok(Value::Tensor(x.tensor(&y).at(pos)?))
}

/// Integer-multiple-of-one-variable polynomials `c * s`.
fn linear_in_one_variable(p: &ExpPoly) -> Option<(usize, i64)> {
    let mut terms = p.terms();
    let (m, c) = terms.next()?;
    if terms.next().is_some() || m.exp_weights().iter().any(|&w| w != 0) {
        return None;
    }
    let vars: Vec<usize> = (0..m.nvars()).filter(|&i| m.power(i) > 0).collect();
    match vars.as_slice() {
        [v] if m.power(*v) == 1 => Some((*v, c.to_i64()?)),
        _ => None,
    }
}

impl Session {
    pub fn new(seed: u64) -> Self {
        Session {
            seed,
            ..Session::default()
        }
    }

    /// Bound names in definition order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.get(name)
    }

    /// Parses and runs a whole script, stopping at the first error.
    pub fn run_script(&mut self, src: &str) -> Outcome {
        match parse(src) {
            Ok(stmts) => self.run(&stmts),
            Err(e) => Outcome {
                outputs: Vec::new(),
                error: Some(e.into()),
            },
        }
    }

    pub fn run(&mut self, stmts: &[Stmt]) -> Outcome {
        let mut out = Outcome::default();
        for s in stmts {
            match self.execute(s) {
                Ok(Some(o)) => out.outputs.push(o),
                Ok(None) => {}
                Err(e) => {
                    out.error = Some(e);
                    break;
                }
            }
        }
        out
    }

    /// Runs one statement; definitions bind silently.
    pub fn execute(&mut self, s: &Stmt) -> RResult<Option<Output>> {
        if s.is_definition() {
            self.define(s)?;
            return Ok(None);
        }
        let command = s.command_text();
        let line = s.pos.line;
        Ok(Some(match &s.kind {
            StmtKind::Check { suite, args } => Output::Report {
                report: self.check(suite, args)?,
                command,
                line,
            },
            StmtKind::Lift { kind, target, within } => Output::Value {
                text: self.lift(kind, target, within.as_ref())?,
                command,
                line,
            },
            StmtKind::Bracket {
                kind,
                first,
                second,
                within,
            } => Output::Value {
                text: self.bracket(kind, first, second, within.as_ref())?,
                command,
                line,
            },
            StmtKind::Print { name } => Output::Statement {
                text: self.canonical(&name.text).ok_or_else(|| unknown(name))?,
                line,
            },
            _ => unreachable!("definitions handled above"),
        }))
    }

    fn bind(&mut self, name: &Name, obj: Object) -> RResult<()> {
        if self.objects.contains_key(&name.text) {
            return err(name.pos, format!("`{}` is already defined", name.text));
        }
        self.names.push(name.text.clone());
        self.objects.insert(name.text.clone(), obj);
        Ok(())
    }

    fn lookup(&self, name: &Name) -> RResult<&Object> {
        self.objects.get(&name.text).ok_or_else(|| unknown(name))
    }

    fn chart(&self, name: &Name) -> RResult<ChartRef> {
        match self.lookup(name)? {
            Object::Chart(c) => Ok(c.clone()),
            other => err(name.pos, format!("`{}` is {}, not a chart", name.text, other.describe())),
        }
    }

    fn algebroid(&self, name: &Name) -> RResult<&AlgebroidSpec> {
        match self.lookup(name)? {
            Object::Algebroid { spec, .. } => Ok(spec),
            Object::Cocycle { spec, .. } => Ok(spec.algebroid()),
            other => err(name.pos, format!("`{}` is {}, not an algebroid", name.text, other.describe())),
        }
    }

    fn cocycle(&self, name: &Name) -> RResult<&JacobiAlgebroidSpec> {
        match self.lookup(name)? {
            Object::Cocycle { spec, .. } => Ok(spec),
            other => err(
                name.pos,
                format!("`{}` is {}, not a Jacobi algebroid", name.text, other.describe()),
            ),
        }
    }

    fn field(&self, name: &Name) -> RResult<&MultiVector> {
        match self.lookup(name)? {
            Object::Field { value, .. } => Ok(value),
            other => err(name.pos, format!("`{}` is {}, not a multivector", name.text, other.describe())),
        }
    }

    fn operator(&self, name: &Name) -> RResult<&FirstOrderBiDiffOp> {
        match self.lookup(name)? {
            Object::Operator { value, .. } => Ok(value),
            other => err(name.pos, format!("`{}` is {}, not an operator", name.text, other.describe())),
        }
    }

    /// A 2-tensor on a chart: tensors directly, bivectors expanded.
    fn two_tensor(&self, name: &Name) -> RResult<TensorField> {
        let t = match self.lookup(name)? {
            Object::Tensor { value, .. } => value.clone(),
            Object::Field { value, .. } => value.expand(),
            other => return err(name.pos, format!("`{}` is {}, not a tensor", name.text, other.describe())),
        };
        if t.degree() != 2 {
            return err(name.pos, format!("`{}` has degree {}, expected 2", name.text, t.degree()));
        }
        Ok(t)
    }

    /// Context for objects declared `on` a chart or an algebroid.
    fn context(&self, on: &Name) -> RResult<Ctx> {
        match self.lookup(on)? {
            Object::Chart(c) => Ok(Ctx {
                chart: c.clone(),
                on: on.text.clone(),
                frame: None,
            }),
            Object::Algebroid { spec, .. } => Ok(Ctx {
                chart: spec.base().clone(),
                on: on.text.clone(),
                frame: Some(spec.rank()),
            }),
            Object::Cocycle { spec, .. } => Ok(Ctx {
                chart: spec.base().clone(),
                on: on.text.clone(),
                frame: Some(spec.rank()),
            }),
            other => err(
                on.pos,
                format!("`{}` is {}, not a chart or algebroid", on.text, other.describe()),
            ),
        }
    }

    fn chart_context(&self, on: &Name) -> RResult<Ctx> {
        Ok(Ctx {
            chart: self.chart(on)?,
            on: on.text.clone(),
            frame: None,
        })
    }

    fn framed(&self, on: &str) -> bool {
        !matches!(self.objects.get(on), Some(Object::Chart(_)) | None)
    }

    fn eval(&self, e: &Expr, ctx: &Ctx) -> RResult<Value> {
        let chart = &ctx.chart;
        match e {
            Expr::Int(n, pos) => {
                let n = i64::try_from(*n).or_else(|_| err(*pos, "integer too large"))?;
                Ok(Value::Poly(ExpPoly::int(chart.dim(), n)))
            }
            Expr::Name(n, pos) => self.resolve(n, *pos, ctx),
            Expr::Vector(v, pos) => {
                if ctx.frame.is_some() {
                    return err(*pos, format!("`d/d{v}` is not a section of `{}`; use e1, e2, ...", ctx.on));
                }
                let i = chart.index(v).at(*pos)?;
                Ok(Value::Multi(MultiVector::coordinate_basis(chart, &[i])))
            }
            Expr::Coframe(i, pos) => match ctx.frame {
                Some(r) if (1..=r).contains(i) => Ok(Value::Form(CovariantField::basis(chart, r, &[i - 1]))),
                Some(r) => err(*pos, format!("`e*{i}` is out of range for rank {r}")),
                None => err(*pos, format!("`e*{i}` needs an algebroid frame; use dx for coordinate forms")),
            },
            Expr::Exp(arg, pos) => {
                let Value::Poly(p) = self.eval(arg, ctx)? else {
                    return err(*pos, "exp expects an integer multiple of a variable");
                };
                let (v, m) = linear_in_one_variable(&p)
                    .ok_or(())
                    .or_else(|_| err(*pos, "exp expects an integer multiple of a variable"))?;
                let m = i32::try_from(m).or_else(|_| err(*pos, "exponent too large"))?;
                Ok(Value::Poly(chart.exp_named(&chart.var(v).name, m).at(*pos)?))
            }
            Expr::Neg(inner) => Ok(negate(self.eval(inner, ctx)?)),
            Expr::Pow(base, n, pos) => match self.eval(base, ctx)? {
                Value::Poly(p) => Ok(Value::Poly(p.pow(*n))),
                other => err(*pos, format!("cannot raise {} to a power", other.describe())),
            },
            Expr::Bin(op, a, b, pos) => {
                let (a, b) = (self.eval(a, ctx)?, self.eval(b, ctx)?);
                match op {
                    '+' => sum(a, b, *pos),
                    '-' => sum(a, negate(b), *pos),
                    '*' => product(a, b, *pos),
                    '^' => wedge(a, b, *pos),
                    '@' => tensor_product(a, b, *pos),
                    '/' => {
                        let c = match &b {
                            Value::Poly(p) => p.as_constant().filter(|c| !c.is_zero()),
                            _ => None,
                        };
                        match c {
                            Some(c) => Ok(scale(a, &ExpPoly::constant(chart.dim(), c.recip()))),
                            None => err(*pos, "can only divide by a nonzero number"),
                        }
                    }
                    _ => unreachable!("parser only produces known operators"),
                }
            }
        }
    }

    /// Coordinates, then bound objects on the same target, then frame
    /// elements `e1..`, then coordinate differentials `dx`.
    fn resolve(&self, n: &str, pos: Pos, ctx: &Ctx) -> RResult<Value> {
        let chart = &ctx.chart;
        if let Ok(i) = chart.index(n) {
            return Ok(Value::Poly(chart.coord(i)));
        }
        if let Some(obj) = self.objects.get(n) {
            let same = |on: &str| on == ctx.on || (ctx.frame.is_some() && self.is_base_of(on, ctx));
            let v = match obj {
                Object::Function { on, value } if same(on) => Value::Poly(value.clone()),
                Object::Field { on, value, .. } if on == &ctx.on => Value::Multi(value.clone()),
                Object::Form { on, value } if on == &ctx.on => Value::Form(value.clone()),
                Object::Tensor { on, value } if on == &ctx.on => Value::Tensor(value.clone()),
                _ => return err(pos, format!("`{n}` is {} not usable on `{}`", obj.describe(), ctx.on)),
            };
            return Ok(v);
        }
        match ctx.frame {
            Some(r) => {
                if let Some(i) = frame_index(n, r) {
                    return Ok(Value::Multi(MultiVector::basis(chart, r, &[i])));
                }
            }
            None => {
                if let Some(i) = n.strip_prefix('d').and_then(|v| chart.index(v).ok()) {
                    return Ok(Value::Form(CovariantField::coordinate_basis(chart, &[i])));
                }
            }
        }
        err(pos, format!("unknown name `{n}`"))
    }

    /// Functions on the base chart of an algebroid are usable on the algebroid.
    fn is_base_of(&self, chart_name: &str, ctx: &Ctx) -> bool {
        matches!(self.objects.get(chart_name), Some(Object::Chart(c)) if *c == ctx.chart)
    }

    fn multi(&self, e: &Expr, ctx: &Ctx, degree: Option<usize>) -> RResult<MultiVector> {
        let pos = e.pos();
        let m = match self.eval(e, ctx)? {
            Value::Poly(p) if p.is_zero() => match degree {
                Some(d) => MultiVector::zero(&ctx.chart, ctx.rank(), d),
                None => return err(pos, "a zero multivector needs `degree k`"),
            },
            Value::Poly(p) => MultiVector::scalar(&ctx.chart, ctx.rank(), p),
            Value::Multi(m) => m,
            other => return err(pos, format!("expected a multivector, found {}", other.describe())),
        };
        match degree {
            Some(d) if d != m.degree() && !m.is_zero() => {
                err(pos, format!("expected degree {d}, found degree {}", m.degree()))
            }
            Some(d) if d != m.degree() => Ok(MultiVector::zero(&ctx.chart, ctx.rank(), d)),
            _ => Ok(m),
        }
    }

    fn form(&self, e: &Expr, ctx: &Ctx, degree: Option<usize>) -> RResult<CovariantField> {
        let pos = e.pos();
        let f = match self.eval(e, ctx)? {
            Value::Poly(p) if p.is_zero() => match degree {
                Some(d) => CovariantField::zero(&ctx.chart, ctx.rank(), d),
                None => return err(pos, "a zero form needs `degree k`"),
            },
            Value::Poly(p) => CovariantField::scalar(&ctx.chart, ctx.rank(), p),
            Value::Form(f) => f,
            other => return err(pos, format!("expected a form, found {}", other.describe())),
        };
        match degree {
            Some(d) if d != f.degree() && !f.is_zero() => {
                err(pos, format!("expected degree {d}, found degree {}", f.degree()))
            }
            Some(d) if d != f.degree() => Ok(CovariantField::zero(&ctx.chart, ctx.rank(), d)),
            _ => Ok(f),
        }
    }

    fn tensor(&self, e: &Expr, ctx: &Ctx, degree: Option<usize>) -> RResult<TensorField> {
        let pos = e.pos();
        let t = match self.eval(e, ctx)? {
            Value::Poly(p) if p.is_zero() => match degree {
                Some(d) => TensorField::zero(&ctx.chart, ctx.rank(), d),
                None => return err(pos, "a zero tensor needs `degree k`"),
            },
            Value::Poly(p) => TensorField::scalar(&ctx.chart, ctx.rank(), p),
            Value::Multi(m) => m.expand(),
            Value::Tensor(t) => t,
            other => return err(pos, format!("expected a tensor, found {}", other.describe())),
        };
        match degree {
            Some(d) if d != t.degree() && !t.is_zero() => {
                err(pos, format!("expected degree {d}, found degree {}", t.degree()))
            }
            Some(d) if d != t.degree() => Ok(TensorField::zero(&ctx.chart, ctx.rank(), d)),
            _ => Ok(t),
        }
    }

    fn function(&self, e: &Expr, ctx: &Ctx) -> RResult<ExpPoly> {
        match self.eval(e, ctx)? {
            Value::Poly(p) => Ok(p),
            other => err(e.pos(), format!("expected a function, found {}", other.describe())),
        }
    }

    fn define(&mut self, s: &Stmt) -> RResult<()> {
        match &s.kind {
            StmtKind::Chart { name, vars, aux } => {
                let mut vs = Vec::new();
                for (n, role) in vars.iter().map(|n| (n, Role::Base)).chain(aux.iter().map(|n| (n, Role::AuxS))) {
                    if self.objects.contains_key(&n.text) {
                        return err(n.pos, format!("`{}` is already bound", n.text));
                    }
                    vs.push(Variable {
                        name: n.text.clone(),
                        role,
                    });
                }
                let chart = Chart::new(vs).at(name.pos)?.into_ref();
                self.bind(name, Object::Chart(chart))
            }
            StmtKind::Object {
                kind,
                name,
                on,
                degree,
                expr,
            } => {
                let ctx = self.context(on)?;
                if ctx.chart.contains(&name.text) {
                    return err(name.pos, format!("`{}` is a coordinate of `{}`", name.text, on.text));
                }
                let on_text = on.text.clone();
                let fixed = match kind {
                    ObjKind::Vector => Some(1),
                    ObjKind::Bivector => Some(2),
                    _ => None,
                };
                if let (Some(f), Some(d)) = (fixed, degree) {
                    if f != *d {
                        return err(s.pos, format!("a {} has degree {f}", kind.keyword()));
                    }
                }
                let degree = fixed.or(*degree);
                let obj = match kind {
                    ObjKind::Function => {
                        if ctx.frame.is_some() {
                            return err(on.pos, "functions live on charts");
                        }
                        Object::Function {
                            on: on_text,
                            value: self.function(expr, &ctx)?,
                        }
                    }
                    ObjKind::Vector | ObjKind::Bivector | ObjKind::Multivector | ObjKind::Section => {
                        if *kind == ObjKind::Section && ctx.frame.is_none() {
                            return err(on.pos, "sections live on algebroids");
                        }
                        Object::Field {
                            kind: *kind,
                            on: on_text,
                            value: self.multi(expr, &ctx, degree)?,
                        }
                    }
                    ObjKind::Tensor => {
                        if ctx.frame.is_some() {
                            return err(on.pos, "tensors live on charts");
                        }
                        Object::Tensor {
                            on: on_text,
                            value: self.tensor(expr, &ctx, degree)?,
                        }
                    }
                    ObjKind::Form => Object::Form {
                        on: on_text,
                        value: self.form(expr, &ctx, degree)?,
                    },
                };
                self.bind(name, obj)
            }
            StmtKind::Jacobi {
                name,
                on,
                lambda,
                gamma,
            } => {
                let ctx = self.chart_context(on)?;
                let l = self.multi(lambda, &ctx, Some(2))?;
                let g = self.multi(gamma, &ctx, Some(1))?;
                let value = FirstOrderBiDiffOp::skew(&l, &g).at(s.pos)?;
                self.bind(
                    name,
                    Object::Operator {
                        on: on.text.clone(),
                        value,
                    },
                )
            }
            StmtKind::BiDiff { name, on, parts } => {
                let ctx = self.chart_context(on)?;
                let t = self.tensor(&parts[0], &ctx, Some(2))?;
                let g1 = self.multi(&parts[1], &ctx, Some(1))?;
                let g2 = self.multi(&parts[2], &ctx, Some(1))?;
                let a = self.function(&parts[3], &ctx)?;
                let value = FirstOrderBiDiffOp::new(t, g1, g2, a).at(s.pos)?;
                self.bind(
                    name,
                    Object::Operator {
                        on: on.text.clone(),
                        value,
                    },
                )
            }
            StmtKind::Algebroid {
                name,
                on,
                rank,
                entries,
            } => {
                let chart = self.chart(on)?;
                let mut spec = AlgebroidSpec::new(&chart, *rank);
                let frame = Ctx {
                    chart: chart.clone(),
                    on: name.text.clone(),
                    frame: Some(*rank),
                };
                let coords = Ctx {
                    chart: chart.clone(),
                    on: on.text.clone(),
                    frame: None,
                };
                for entry in entries {
                    match entry {
                        AlgebroidEntry::Bracket(i, j, e) => {
                            if *i >= *rank || *j >= *rank {
                                return err(e.pos(), format!("frame index out of range for rank {rank}"));
                            }
                            if i == j {
                                return err(e.pos(), "the bracket of a frame element with itself is zero");
                            }
                            let m = self.multi(e, &frame, Some(1))?;
                            let (i, j, sign) = if i < j { (*i, *j, 1) } else { (*j, *i, -1) };
                            for (k, c) in m.comps() {
                                spec.set_bracket(i, j, k[0], c.scale_int(sign));
                            }
                        }
                        AlgebroidEntry::Anchor(i, e) => {
                            if *i >= *rank {
                                return err(e.pos(), format!("frame index out of range for rank {rank}"));
                            }
                            let m = self.multi(e, &coords, Some(1))?;
                            for (a, c) in m.comps() {
                                spec.set_anchor(*i, a[0], c.clone());
                            }
                        }
                    }
                }
                let v = spec.validate();
                if !v.is_valid() {
                    return err(s.pos, format!("not a Lie algebroid: {}", v.issues.join("; ")));
                }
                self.bind(
                    name,
                    Object::Algebroid {
                        on: on.text.clone(),
                        spec,
                    },
                )
            }
            StmtKind::Preset { name, preset, chart } => {
                let c = self.chart(chart)?;
                let spec = match preset.text.as_str() {
                    "tangent" => AlgebroidSpec::tangent(&c),
                    "first_order" => AlgebroidSpec::first_order(&c),
                    "so3" => AlgebroidSpec::so3(&c),
                    "so3_extended" => AlgebroidSpec::so3_extended(&c),
                    "heisenberg" => AlgebroidSpec::heisenberg(&c),
                    other => {
                        return Err(ScriptError {
                            pos: preset.pos,
                            message: format!("unknown algebroid `{other}`"),
                            expected: ["tangent", "first_order", "so3", "so3_extended", "heisenberg"]
                                .iter()
                                .map(|s| s.to_string())
                                .collect(),
                        })
                    }
                };
                self.bind(
                    name,
                    Object::Algebroid {
                        on: chart.text.clone(),
                        spec,
                    },
                )
            }
            StmtKind::Cocycle { name, on, expr } => {
                let spec = match self.lookup(on)? {
                    Object::Algebroid { spec, .. } => spec.clone(),
                    other => return err(on.pos, format!("`{}` is {}, not an algebroid", on.text, other.describe())),
                };
                let ctx = self.context(on)?;
                let phi = self.form(expr, &ctx, Some(1))?;
                let jspec = JacobiAlgebroidSpec::new(spec, phi).at(expr.pos())?;
                let v = jspec.validate();
                if !v.is_valid() {
                    return err(expr.pos(), format!("not a Jacobi algebroid: {}", v.issues.join("; ")));
                }
                self.bind(
                    name,
                    Object::Cocycle {
                        on: on.text.clone(),
                        spec: jspec,
                    },
                )
            }
            _ => unreachable!("commands are not definitions"),
        }
    }

    /// The statement that re-creates a binding.
    pub fn canonical(&self, name: &str) -> Option<String> {
        let obj = self.objects.get(name)?;
        let degree_clause = |zero: bool, d: usize| if zero { format!(" degree {d}") } else { String::new() };
        Some(match obj {
            Object::Chart(c) => {
                let (base, aux): (Vec<_>, Vec<_>) = c.vars().iter().partition(|v| v.role != Role::AuxS);
                let join = |vs: &[&Variable]| vs.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(", ");
                if aux.is_empty() {
                    format!("chart {name}({})", join(&base))
                } else {
                    format!("chart {name}({} | {})", join(&base), join(&aux))
                }
            }
            Object::Function { on, value } => {
                let c = match self.objects.get(on) {
                    Some(Object::Chart(c)) => c,
                    _ => return None,
                };
                format!("function {name} on {on} = {}", c.render(value))
            }
            Object::Field { kind, on, value } => {
                let explicit = matches!(kind, ObjKind::Multivector | ObjKind::Section) && value.is_zero();
                format!(
                    "{} {name} on {on}{} = {}",
                    kind.keyword(),
                    degree_clause(explicit, value.degree()),
                    render_multi(value, self.framed(on))
                )
            }
            Object::Tensor { on, value } => format!(
                "tensor {name} on {on}{} = {}",
                degree_clause(value.is_zero(), value.degree()),
                value.render()
            ),
            Object::Form { on, value } => format!(
                "form {name} on {on}{} = {}",
                degree_clause(value.is_zero(), value.degree()),
                render_form(value, self.framed(on))
            ),
            Object::Operator { on, value } => {
                let keyword = if value.is_skew() { "jacobi" } else { "bidiff" };
                format!("{keyword} {name} on {on} = {}", render_operator(value))
            }
            Object::Algebroid { on, spec } => {
                let r = spec.rank();
                let labels = frame_labels(r);
                let mut entries = Vec::new();
                for i in 0..r {
                    for j in i + 1..r {
                        let mut m = MultiVector::zero(spec.base(), r, 1);
                        for (k, c) in spec.structure(i, j) {
                            m.add_term(&[k], c.clone());
                        }
                        if !m.is_zero() {
                            entries.push(format!("[{}, {}] = {}", labels[i], labels[j], render_multi(&m, true)));
                        }
                    }
                }
                for (i, label) in labels.iter().enumerate() {
                    let mut m = MultiVector::coordinate_zero(spec.base(), 1);
                    for (a, c) in spec.anchor_entries(i) {
                        m.add_term(&[a], c.clone());
                    }
                    if !m.is_zero() {
                        entries.push(format!("rho({label}) = {}", m.render()));
                    }
                }
                let body = if entries.is_empty() {
                    " ".to_string()
                } else {
                    format!(" {} ", entries.join("; "))
                };
                format!("algebroid {name} on {on} rank {r} {{{body}}}")
            }
            Object::Cocycle { on, spec } => format!("cocycle {name} on {on} = {}", render_form(spec.phi(), true)),
        })
    }

    /// All definitions as a script, in definition order.
    pub fn definitions_text(&self) -> String {
        self.names
            .iter()
            .filter_map(|n| self.canonical(n))
            .map(|s| s + "\n")
            .collect()
    }

    /// Re-parses the canonical rendering of every binding and compares.
    pub fn roundtrip_report(&self) -> Report {
        let mut rep = Report::new("roundtrip");
        let mut fresh = Session::new(self.seed);
        for name in &self.names {
            let text = self.canonical(name).unwrap_or_default();
            let residual = match parse(&text) {
                Err(e) => Some(format!("parse error {e}")),
                Ok(stmts) => match stmts.first().map(|s| fresh.define(s)) {
                    Some(Ok(())) if fresh.objects.get(name) == self.objects.get(name) => None,
                    Some(Ok(())) => Some(format!(
                        "re-parsed to {}",
                        fresh.canonical(name).unwrap_or_default()
                    )),
                    Some(Err(e)) => Some(format!("error {e}")),
                    None => Some("empty rendering".into()),
                },
            };
            rep.push(name, &text, residual);
        }
        rep
    }

    fn check(&self, suite: &Name, args: &[Name]) -> RResult<Report> {
        let arity = |lo: usize, hi: usize, usage: &str| -> RResult<()> {
            if args.len() < lo || args.len() > hi {
                err(suite.pos, format!("usage: check {usage}"))
            } else {
                Ok(())
            }
        };
        let pos = suite.pos;
        match suite.text.as_str() {
            "thm6" => {
                arity(1, 2, "thm6 L [L1]")?;
                let l = self.two_tensor(&args[0])?;
                let w = Theorem6Witness {
                    f: None,
                    lambda1: args.get(1).map(|a| self.two_tensor(a)).transpose()?,
                };
                theorem6_suite(&l, &w).at(pos)
            }
            "thm7" => {
                arity(2, 2, "thm7 A X")?;
                theorem7_suite(self.algebroid(&args[0])?, self.field(&args[1])?).at(pos)
            }
            "thm8" => {
                arity(1, 2, "thm8 J [J1]")?;
                let j1 = args.get(1).map(|a| self.operator(a)).transpose()?;
                theorem8_suite(self.operator(&args[0])?, j1).at(pos)
            }
            "thm10" => {
                arity(2, 2, "thm10 K X")?;
                theorem10_suite(self.cocycle(&args[0])?, self.field(&args[1])?).at(pos)
            }
            "lemma1" => {
                arity(1, 1, "lemma1 J")?;
                lemma_first_order_suite(self.operator(&args[0])?, &LemmaOptions::default()).at(pos)
            }
            "lemma2" => {
                arity(2, 2, "lemma2 K X")?;
                lemma_jacobi_algebroid_suite(self.cocycle(&args[0])?, self.field(&args[1])?, &LemmaOptions::default())
                    .at(pos)
            }
            "poisson" => {
                arity(1, 1, "poisson L")?;
                let l = self.field(&args[0])?;
                let framed = self.framed(field_on(self, &args[0]));
                let mut rep = Report::new("poisson");
                let r = if framed {
                    let spec = self.algebroid(&Name {
                        text: field_on(self, &args[0]).to_string(),
                        pos,
                    })?;
                    schouten_in(spec, l, l).at(pos)?
                } else {
                    schouten(l, l).at(pos)?
                };
                rep.push(
                    "[[L, L]] = 0",
                    &format!("{} is a Poisson structure", args[0].text),
                    (!r.is_zero()).then(|| render_multi(&r, framed)),
                );
                Ok(rep)
            }
            "jacobi" => {
                arity(1, 1, "jacobi J")?;
                let j = self.operator(&args[0])?;
                let mut rep = Report::new("jacobi");
                let Some((l, g)) = j.as_skew() else {
                    rep.push("skew", "J is skew-symmetric", Some(render_operator(j)));
                    return Ok(rep);
                };
                let (r1, r2) = jacobi_residuals(&l, &g).at(pos)?;
                rep.push("[[G, L]] = 0", "first Jacobi identity", (!r1.is_zero()).then(|| r1.render()));
                rep.push(
                    "[[L, L]] = -2 G ^ L",
                    "second Jacobi identity",
                    (!r2.is_zero()).then(|| r2.render()),
                );
                Ok(rep)
            }
            "roundtrip" => {
                arity(0, 0, "roundtrip")?;
                Ok(self.roundtrip_report())
            }
            "battery" => {
                arity(0, 1, "battery [count]")?;
                let count = match args.first() {
                    Some(a) => a
                        .text
                        .parse()
                        .or_else(|_| err(a.pos, "battery count must be a number"))?,
                    None => DEFAULT_BATTERY_COUNT,
                };
                battery(self.seed, count).at(pos)
            }
            other => Err(ScriptError {
                pos,
                message: format!("unknown suite `{other}`"),
                expected: SUITES.iter().map(|s| s.to_string()).collect(),
            }),
        }
    }

    /// Algebroid named by `in`, else the one a field lives on.
    fn field_algebroid(&self, field: &Name, within: Option<&Name>) -> RResult<Option<&AlgebroidSpec>> {
        if let Some(w) = within {
            return self.algebroid(w).map(Some);
        }
        let on = field_on(self, field);
        if self.framed(on) {
            return self
                .algebroid(&Name {
                    text: on.to_string(),
                    pos: field.pos,
                })
                .map(Some);
        }
        Ok(None)
    }

    fn lift(&self, kind: &Name, target: &Name, within: Option<&Name>) -> RResult<String> {
        let pos = kind.pos;
        let need_in = |what: &str| -> RResult<&Name> {
            within.ok_or_else(|| ScriptError {
                pos: target.pos,
                message: format!("lift {} of a section needs `in {what}`", kind.text),
                expected: Vec::new(),
            })
        };
        match kind.text.as_str() {
            "complete" | "vertical" => {
                let complete = kind.text == "complete";
                match self.lookup(target)? {
                    Object::Field { value, .. } => {
                        let (spec, total) = match self.field_algebroid(target, within)? {
                            Some(spec) => (spec.clone(), spec.total_chart().at(pos)?),
                            None => (
                                AlgebroidSpec::tangent(value.chart()),
                                BundleChart::tangent(value.chart()).at(pos)?,
                            ),
                        };
                        let out = if complete {
                            complete_lift(&spec, &total, value).at(pos)?
                        } else {
                            total.vertical(value).at(pos)?
                        };
                        Ok(out.render())
                    }
                    Object::Tensor { value, .. } if complete => Ok(render_tensor(&complete_lift_tangent(value).at(pos)?)),
                    Object::Tensor { value, .. } => {
                        let total = BundleChart::tangent(value.chart()).at(pos)?;
                        Ok(render_tensor(&total.vertical_tensor(value).at(pos)?))
                    }
                    Object::Function { value, on } => {
                        let c = self.chart(&Name {
                            text: on.clone(),
                            pos,
                        })?;
                        let (spec, total) = match within {
                            Some(w) => {
                                let spec = self.algebroid(w)?.clone();
                                let total = spec.total_chart().at(pos)?;
                                (spec, total)
                            }
                            None => (AlgebroidSpec::tangent(&c), BundleChart::tangent(&c).at(pos)?),
                        };
                        let out = if complete {
                            function_complete_lift(&spec, &total, value).at(pos)?
                        } else {
                            total.lift_base(value)
                        };
                        Ok(total.total().render(&out))
                    }
                    other => err(
                        target.pos,
                        format!("cannot lift {}; expected a multivector, tensor or function", other.describe()),
                    ),
                }
            }
            "jacobi" => match self.lookup(target)? {
                Object::Operator { value, .. } => Ok(render_operator(&jacobi_lift(value).at(pos)?)),
                Object::Field { value, .. } => {
                    let k = self.cocycle(need_in("K")?)?;
                    let total = k.algebroid().total_chart().at(pos)?;
                    Ok(jacobi_lift_algebroid(k, &total, value).at(pos)?.render())
                }
                other => err(target.pos, format!("cannot take the Jacobi lift of {}", other.describe())),
            },
            "poisson" => match self.lookup(target)? {
                Object::Operator { value, .. } => Ok(render_tensor(&poisson_lift(value).at(pos)?)),
                Object::Field { value, .. } => {
                    let k = self.cocycle(need_in("K")?)?;
                    let total = k.algebroid().total_chart().at(pos)?;
                    Ok(poisson_lift_algebroid(k, &total, value).at(pos)?.render())
                }
                other => err(target.pos, format!("cannot take the Poisson lift of {}", other.describe())),
            },
            "poissonization" => Ok(render_tensor(&poissonization(self.operator(target)?).at(pos)?)),
            "gauge" => {
                let k = self.cocycle(need_in("K")?)?;
                let hat = k.extend_hat().at(pos)?;
                let out = p_phi(&hat, self.field(target)?).at(pos)?;
                Ok(render_multi(&out, true))
            }
            "linear" => {
                let spec = self.algebroid(target)?;
                Ok(spec.linear_poisson(&spec.dual_chart().at(pos)?).at(pos)?.render())
            }
            "canonical" => {
                let k = self.cocycle(target)?;
                let dual = k.algebroid().dual_chart().at(pos)?;
                Ok(k.canonical_jacobi_dual(&dual).at(pos)?.render())
            }
            other => Err(ScriptError {
                pos,
                message: format!("unknown lift `{other}`"),
                expected: LIFTS.iter().map(|s| s.to_string()).collect(),
            }),
        }
    }

    /// A field or skew operator as `main + I ^ ident`.
    fn poly_diff_op(&self, name: &Name) -> RResult<PolyDiffOp> {
        match self.lookup(name)? {
            Object::Field { value, .. } => Ok(PolyDiffOp::from_main(value.clone())),
            Object::Operator { value, .. } => {
                let (l, g) = value.as_skew().ok_or_else(|| ScriptError {
                    pos: name.pos,
                    message: format!("`{}` is not skew-symmetric", name.text),
                    expected: Vec::new(),
                })?;
                PolyDiffOp::new(l, g).at(name.pos)
            }
            other => err(name.pos, format!("cannot bracket {}", other.describe())),
        }
    }

    fn bracket(&self, kind: &Name, first: &Name, second: &Name, within: Option<&Name>) -> RResult<String> {
        let pos = kind.pos;
        match kind.text.as_str() {
            "schouten" => {
                let (x, y) = (self.field(first)?, self.field(second)?);
                match self.field_algebroid(first, within)? {
                    Some(spec) => Ok(render_multi(&schouten_in(spec, x, y).at(pos)?, true)),
                    None => Ok(schouten(x, y).at(pos)?.render()),
                }
            }
            "jacobi" => match within {
                Some(k) => {
                    let k = self.cocycle(k)?;
                    let out = deformed_schouten_jacobi(k, self.field(first)?, self.field(second)?).at(pos)?;
                    Ok(render_multi(&out, true))
                }
                None => {
                    let (a, b) = (self.poly_diff_op(first)?, self.poly_diff_op(second)?);
                    Ok(schouten_jacobi_first_order(&a, &b).at(pos)?.render())
                }
            },
            other => Err(ScriptError {
                pos,
                message: format!("unknown bracket `{other}`"),
                expected: vec!["schouten".into(), "jacobi".into()],
            }),
        }
    }
}

fn field_on<'a>(s: &'a Session, name: &Name) -> &'a str {
    match s.objects.get(&name.text) {
        Some(Object::Field { on, .. }) => on,
        _ => "",
    }
}

fn unknown(name: &Name) -> ScriptError {
    ScriptError {
        pos: name.pos,
        message: format!("unknown name `{}`", name.text),
        expected: Vec::new(),
    }
}

pub const SUITES: &[&str] = &[
    "thm6", "thm7", "thm8", "thm10", "lemma1", "lemma2", "poisson", "jacobi", "roundtrip", "battery",
];

pub const LIFTS: &[&str] = &[
    "complete",
    "vertical",
    "jacobi",
    "poisson",
    "poissonization",
    "gauge",
    "linear",
    "canonical",
];
