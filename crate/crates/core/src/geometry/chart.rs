use std::fmt;
use std::sync::Arc;

use crate::coeff::ExpPoly;
use crate::error::{Error, Result};

/// What a coordinate is for. Fiber roles record the index of the base
/// variable (tangent/cotangent) or frame element (bundle/dual) they sit over.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Base,
    TangentFiber(usize),
    CotangentFiber(usize),
    BundleFiber(usize),
    DualFiber(usize),
    AuxT,
    AuxLambda,
    /// Base-like auxiliary coordinate that may carry an exponential generator.
    AuxS,
}

impl Role {
    /// Base and `AuxS` coordinates live on the base manifold.
    pub fn is_base_like(&self) -> bool {
        matches!(self, Role::Base | Role::AuxS)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub role: Role,
}

/// An ordered list of uniquely named coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    vars: Vec<Variable>,
}

pub type ChartRef = Arc<Chart>;

/// How [`Chart::prolong`] extends a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prolongation {
    /// Adds `v_x` for every base coordinate `x`.
    Tangent,
    /// Adds `p_x` for every base coordinate `x`.
    Cotangent,
    /// Appends one auxiliary coordinate.
    TimesR(String, Role),
}

impl Chart {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if v.name.is_empty() {
                return Err(Error::Invalid("empty variable name".into()));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::NameCollision(v.name.clone()));
            }
        }
        Ok(Chart { vars })
    }

    /// A chart of base coordinates.
    pub fn base<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Self::new(
            names
                .iter()
                .map(|n| Variable {
                    name: n.as_ref().to_string(),
                    role: Role::Base,
                })
                .collect(),
        )
    }

    pub fn into_ref(self) -> ChartRef {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &Variable {
        &self.vars[i]
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v.name == name)
    }

    pub fn is_base_chart(&self) -> bool {
        self.vars.iter().all(|v| v.role.is_base_like())
    }

    pub fn base_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.vars[i].role.is_base_like())
            .collect()
    }

    pub fn zero(&self) -> ExpPoly {
        ExpPoly::zero(self.dim())
    }

    pub fn one(&self) -> ExpPoly {
        ExpPoly::one(self.dim())
    }

    pub fn coord(&self, i: usize) -> ExpPoly {
        ExpPoly::var(self.dim(), i)
    }

    pub fn coord_named(&self, name: &str) -> Result<ExpPoly> {
        Ok(self.coord(self.index(name)?))
    }

    /// `exp(m * s)` for an `AuxS` coordinate.
    pub fn exp_named(&self, name: &str, m: i32) -> Result<ExpPoly> {
        let i = self.index(name)?;
        if self.vars[i].role != Role::AuxS {
            return Err(Error::Invalid(format!(
                "`{name}` does not carry an exponential generator"
            )));
        }
        Ok(ExpPoly::exp(self.dim(), i, m))
    }

    /// Partial derivative by variable name.
    pub fn differentiate(&self, p: &ExpPoly, name: &str) -> Result<ExpPoly> {
        self.check_poly(p)?;
        Ok(p.derivative(self.index(name)?))
    }

    pub fn check_poly(&self, p: &ExpPoly) -> Result<()> {
        if p.nvars() != self.dim() {
            return Err(Error::ChartMismatch(format!(
                "polynomial over {} variables used on a chart with {}",
                p.nvars(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn prolong(&self, mode: &Prolongation) -> Result<Chart> {
        let mut vars = self.vars.clone();
        match mode {
            Prolongation::Tangent | Prolongation::Cotangent => {
                if !self.is_base_chart() {
                    return Err(Error::NotBaseChart(self.to_string()));
                }
                for (i, v) in self.vars.iter().enumerate() {
                    let (name, role) = match mode {
                        Prolongation::Tangent => (format!("v_{}", v.name), Role::TangentFiber(i)),
                        _ => (format!("p_{}", v.name), Role::CotangentFiber(i)),
                    };
                    vars.push(Variable { name, role });
                }
            }
            Prolongation::TimesR(name, role) => vars.push(Variable {
                name: name.clone(),
                role: role.clone(),
            }),
        }
        Chart::new(vars)
    }

    /// Index in `self` of every variable of `sub`, matched by name.
    pub fn embedding_of(&self, sub: &Chart) -> Result<Vec<usize>> {
        sub.vars.iter().map(|v| self.index(&v.name)).collect()
    }

    /// Pulls a polynomial on `sub` back along the name-matching projection.
    pub fn lift_from(&self, sub: &Chart, p: &ExpPoly) -> Result<ExpPoly> {
        sub.check_poly(p)?;
        Ok(p.reindex(self.dim(), &self.embedding_of(sub)?))
    }

    pub fn render(&self, p: &ExpPoly) -> String {
        p.render(&self.names())
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names().join(", "))
    }
}

pub(crate) fn same_chart(a: &ChartRef, b: &ChartRef) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ChartMismatch(format!("{a} vs {b}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prolongations() {
        let m = Chart::base(&["x"]).unwrap();
        let tm = m.prolong(&Prolongation::Tangent).unwrap();
        assert_eq!(tm.names(), ["x", "v_x"]);
        let m2 = Chart::base(&["x", "y"]).unwrap();
        let ctm = m2.prolong(&Prolongation::Cotangent).unwrap();
        assert_eq!(ctm.names(), ["x", "y", "p_x", "p_y"]);
        let tmr = tm
            .prolong(&Prolongation::TimesR("t".into(), Role::AuxT))
            .unwrap();
        assert_eq!(tmr.names(), ["x", "v_x", "t"]);
        assert_eq!(tmr.var(2).role, Role::AuxT);
    }

    #[test]
    fn collisions_and_unknowns() {
        let m = Chart::base(&["x", "v_x"]).unwrap();
        assert_eq!(
            m.prolong(&Prolongation::Tangent),
            Err(Error::NameCollision("v_x".into()))
        );
        assert!(Chart::base(&["x", "x"]).is_err());
        let tm = Chart::base(&["x"]).unwrap().prolong(&Prolongation::Tangent).unwrap();
        assert!(matches!(tm.prolong(&Prolongation::Tangent), Err(Error::NotBaseChart(_))));
        let p = m.coord(0);
        assert_eq!(
            m.differentiate(&p, "z"),
            Err(Error::UnknownVariable("z".into()))
        );
    }

    #[test]
    fn exp_needs_aux_s() {
        let c = Chart::base(&["x"])
            .unwrap()
            .prolong(&Prolongation::TimesR("s".into(), Role::AuxS))
            .unwrap();
        assert!(c.exp_named("s", -1).is_ok());
        assert!(c.exp_named("x", 1).is_err());
    }
}
