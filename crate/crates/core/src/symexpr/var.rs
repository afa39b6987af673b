//! Variables, opaque function symbols, and the per-session declaration context.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::ExprError;

/// Kind of a scalar variable.
///
/// Complex kinds carry the name of their conjugate partner; the partner of the
/// partner is the variable itself. `barred` marks which of the two is the
/// conjugated member (`zbar1`, `tbar`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    RealCoordinate,
    ComplexCoordinate { conj: Arc<str>, barred: bool },
    RealParameter,
    ComplexParameter { conj: Arc<str>, barred: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    name: Arc<str>,
    kind: VarKind,
}

impl Var {
    pub fn real_coordinate(name: &str) -> Var {
        Var { name: name.into(), kind: VarKind::RealCoordinate }
    }

    pub fn real_parameter(name: &str) -> Var {
        Var { name: name.into(), kind: VarKind::RealParameter }
    }

    /// A complex coordinate and its conjugate partner, in that order.
    pub fn complex_coordinate(name: &str, conj: &str) -> (Var, Var) {
        let z = Var {
            name: name.into(),
            kind: VarKind::ComplexCoordinate { conj: conj.into(), barred: false },
        };
        let zb = z.conj();
        (z, zb)
    }

    /// A complex parameter and its conjugate partner, in that order.
    pub fn complex_parameter(name: &str, conj: &str) -> (Var, Var) {
        let t = Var {
            name: name.into(),
            kind: VarKind::ComplexParameter { conj: conj.into(), barred: false },
        };
        let tb = t.conj();
        (t, tb)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &VarKind {
        &self.kind
    }

    pub fn is_coordinate(&self) -> bool {
        matches!(self.kind, VarKind::RealCoordinate | VarKind::ComplexCoordinate { .. })
    }

    pub fn is_parameter(&self) -> bool {
        !self.is_coordinate()
    }

    pub fn is_real(&self) -> bool {
        matches!(self.kind, VarKind::RealCoordinate | VarKind::RealParameter)
    }

    /// The conjugate variable; real variables are their own conjugate.
    pub fn conj(&self) -> Var {
        match &self.kind {
            VarKind::RealCoordinate | VarKind::RealParameter => self.clone(),
            VarKind::ComplexCoordinate { conj, barred } => Var {
                name: conj.clone(),
                kind: VarKind::ComplexCoordinate { conj: self.name.clone(), barred: !barred },
            },
            VarKind::ComplexParameter { conj, barred } => Var {
                name: conj.clone(),
                kind: VarKind::ComplexParameter { conj: self.name.clone(), barred: !barred },
            },
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Reality of an opaque function symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FnReality {
    Real,
    /// ℂ-valued; `conj` names the declared conjugate symbol.
    Complex { conj: Arc<str> },
}

/// An opaque smooth function of an ordered list of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FnSym {
    name: Arc<str>,
    args: Arc<[Var]>,
    reality: FnReality,
}

impl FnSym {
    pub fn real(name: &str, args: &[Var]) -> FnSym {
        FnSym { name: name.into(), args: args.into(), reality: FnReality::Real }
    }

    pub fn complex(name: &str, conj: &str, args: &[Var]) -> FnSym {
        FnSym {
            name: name.into(),
            args: args.into(),
            reality: FnReality::Complex { conj: conj.into() },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn args(&self) -> &[Var] {
        &self.args
    }

    pub fn reality(&self) -> &FnReality {
        &self.reality
    }

    pub fn is_real(&self) -> bool {
        self.reality == FnReality::Real
    }

    /// Conjugate symbol; its argument list is the conjugated argument list,
    /// positionally aligned with `self`.
    pub fn conj(&self) -> FnSym {
        match &self.reality {
            FnReality::Real => self.clone(),
            FnReality::Complex { conj } => FnSym {
                name: conj.clone(),
                args: self.args.iter().map(Var::conj).collect::<Vec<_>>().into(),
                reality: FnReality::Complex { conj: self.name.clone() },
            },
        }
    }

    pub fn arg_index(&self, v: &Var) -> Vec<usize> {
        self.args
            .iter()
            .enumerate()
            .filter(|(_, a)| *a == v)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Declarations for one session: every name is declared once.
#[derive(Clone, Debug, Default)]
pub struct VarContext {
    vars: BTreeMap<String, Var>,
    fns: BTreeMap<String, FnSym>,
    /// Declared attributes such as periodicity; recorded, never verified.
    attributes: BTreeMap<String, Vec<String>>,
}

impl VarContext {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_free(&self, name: &str) -> Result<(), ExprError> {
        if self.vars.contains_key(name) || self.fns.contains_key(name) {
            return Err(ExprError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    pub fn declare_var(&mut self, v: Var) -> Result<Var, ExprError> {
        self.check_free(v.name())?;
        self.vars.insert(v.name().to_string(), v.clone());
        Ok(v)
    }

    pub fn real_coordinate(&mut self, name: &str) -> Result<Var, ExprError> {
        self.declare_var(Var::real_coordinate(name))
    }

    pub fn real_parameter(&mut self, name: &str) -> Result<Var, ExprError> {
        self.declare_var(Var::real_parameter(name))
    }

    pub fn complex_parameter(&mut self, name: &str, conj: &str) -> Result<(Var, Var), ExprError> {
        let (t, tb) = Var::complex_parameter(name, conj);
        self.check_free(conj)?;
        self.declare_var(t.clone())?;
        self.declare_var(tb.clone())?;
        Ok((t, tb))
    }

    pub fn complex_coordinate(&mut self, name: &str, conj: &str) -> Result<(Var, Var), ExprError> {
        let (z, zb) = Var::complex_coordinate(name, conj);
        self.check_free(conj)?;
        self.declare_var(z.clone())?;
        self.declare_var(zb.clone())?;
        Ok((z, zb))
    }

    pub fn declare_fn(&mut self, f: FnSym) -> Result<FnSym, ExprError> {
        self.check_free(f.name())?;
        for a in f.args() {
            if self.vars.get(a.name()) != Some(a) {
                return Err(ExprError::UnknownName(a.name().to_string()));
            }
        }
        if let FnReality::Complex { conj } = f.reality() {
            self.check_free(conj)?;
            let c = f.conj();
            self.fns.insert(c.name().to_string(), c);
        }
        self.fns.insert(f.name().to_string(), f.clone());
        Ok(f)
    }

    pub fn var(&self, name: &str) -> Option<&Var> {
        self.vars.get(name)
    }

    pub fn func(&self, name: &str) -> Option<&FnSym> {
        self.fns.get(name)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.vars.values()
    }

    pub fn fns(&self) -> impl Iterator<Item = &FnSym> {
        self.fns.values()
    }

    pub fn set_attribute(&mut self, name: &str, attr: &str) {
        self.attributes.entry(name.to_string()).or_default().push(attr.to_string());
    }

    pub fn attributes(&self, name: &str) -> &[String] {
        self.attributes.get(name).map(|v| v.as_slice()).unwrap_or(&[])
    }
}
