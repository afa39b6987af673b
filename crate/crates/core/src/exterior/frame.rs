use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use super::basis::{Basis, Covector, Tag};
use super::coframe::Coframe;
use super::form::{Form, Word};
use crate::error::{Error, Result};
use crate::symexpr::{Expr, Var, VarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameMode {
    /// Coefficients may depend on the point; `d` differentiates them.
    Coordinate,
    /// Left-invariant coframe: coefficients depend on parameters only.
    Invariant,
}

/// A covector basis together with the data that determines `d`:
/// the differential of each coordinate and of each basis covector.
pub struct Frame {
    mode: FrameMode,
    basis: Arc<Basis>,
    coords: Vec<(Var, Form)>,
    structure: Vec<Form>,
    cache: RwLock<HashMap<Word, Form>>,
}

impl Clone for Frame {
    fn clone(&self) -> Frame {
        Frame {
            mode: self.mode,
            basis: self.basis.clone(),
            coords: self.coords.clone(),
            structure: self.structure.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl std::fmt::Debug for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Frame").field("mode", &self.mode).field("basis", &self.basis.to_string()).finish()
    }
}

impl Frame {
    /// Coordinate differentials `dv` for the given coordinates.
    ///
    /// Real coordinates give real covectors; a complex coordinate and its
    /// conjugate give a holomorphic/antiholomorphic pair.
    pub fn coordinate(vars: &[Var]) -> Frame {
        let mut covectors = Vec::new();
        for v in vars {
            assert!(v.is_coordinate(), "`{v}` is not a coordinate");
            let i = covectors.len();
            let (tag, conj) = match v.kind() {
                VarKind::RealCoordinate => (Tag::Real, i),
                VarKind::ComplexCoordinate { barred, .. } => {
                    let partner = v.conj();
                    let j = vars.iter().position(|w| *w == partner).expect("conjugate coordinate missing");
                    (if *barred { Tag::Antiholomorphic } else { Tag::Holomorphic }, j)
                }
                _ => unreachable!(),
            };
            covectors.push(Covector { name: format!("d{}", v.name()), tag, conj });
        }
        let basis = Basis::from_covectors(covectors);
        let coords = vars.iter().enumerate().map(|(i, v)| (v.clone(), Form::covector(&basis, i))).collect();
        let structure = vec![Form::zero(&basis); basis.dim()];
        Frame { mode: FrameMode::Coordinate, basis, coords, structure, cache: RwLock::new(HashMap::new()) }
    }

    /// `ℝ^{2n}` with coordinates `x1..xn, y1..yn` and basis `dx1..dxn, dy1..dyn`.
    pub fn real_coordinates(n: usize) -> Frame {
        let xs = (1..=n).map(|j| Var::real_coordinate(&format!("x{j}")));
        let ys = (1..=n).map(|j| Var::real_coordinate(&format!("y{j}")));
        let vars: Vec<Var> = xs.chain(ys).collect();
        Frame::coordinate(&vars)
    }

    /// A left-invariant coframe given by its structure equations `d e^b = structure[b]`.
    pub fn invariant(basis: &Arc<Basis>, structure: Vec<Form>) -> Result<Frame> {
        assert_eq!(structure.len(), basis.dim());
        for (b, s) in structure.iter().enumerate() {
            if !Basis::same(s.basis(), basis) {
                return Err(Error::BasisMismatch);
            }
            if !s.is_zero() && s.degree()? != 2 {
                return Err(Error::Invalid(format!("d{} must be a 2-form", basis.name(b))));
            }
            if let Some((_, e)) = s.terms().find(|(_, e)| !e.is_pointwise_constant()) {
                return Err(Error::PointDependentCoefficient(e.to_string()));
            }
        }
        let frame = Frame {
            mode: FrameMode::Invariant,
            basis: basis.clone(),
            coords: Vec::new(),
            structure,
            cache: RwLock::new(HashMap::new()),
        };
        frame.check_d2()?;
        Ok(frame)
    }

    /// The frame on a coframe's basis induced from its parent frame.
    pub fn induced(parent: &Frame, coframe: &Coframe) -> Result<Frame> {
        if !Basis::same(parent.basis(), coframe.parent()) {
            return Err(Error::BasisMismatch);
        }
        let coords = parent
            .coords
            .iter()
            .map(|(v, dv)| Ok((v.clone(), coframe.to_coframe(dv)?)))
            .collect::<Result<Vec<_>>>()?;
        let structure = coframe
            .forms()
            .iter()
            .map(|theta| coframe.to_coframe(&parent.d(theta)?))
            .collect::<Result<Vec<_>>>()?;
        let mode = if coords.is_empty()
            && structure.iter().all(|s| s.terms().all(|(_, e)| e.is_pointwise_constant()))
        {
            FrameMode::Invariant
        } else {
            FrameMode::Coordinate
        };
        Ok(Frame { mode, basis: coframe.basis().clone(), coords, structure, cache: RwLock::new(HashMap::new()) })
    }

    /// Re-read an induced coordinate frame as an invariant one when all its
    /// structure coefficients are constant on the manifold.
    pub fn to_invariant(&self) -> Result<Frame> {
        Frame::invariant(&self.basis, self.structure.clone())
    }

    /// `dz_j = dx_j + i dy_j`, for frames with coordinates `xj`, `yj`.
    pub fn dz(&self, j: usize) -> Result<Form> {
        let dx = Form::named(&self.basis, &format!("dx{j}"))?;
        let dy = Form::named(&self.basis, &format!("dy{j}"))?;
        Ok(&dx + &dy.scale(&Expr::i()))
    }

    /// `dz̄_j = dx_j - i dy_j`.
    pub fn dzbar(&self, j: usize) -> Result<Form> {
        Ok(self.dz(j)?.conj())
    }

    /// `z_j = x_j + i y_j`.
    pub fn z(&self, j: usize) -> Result<Expr> {
        let x = self.coord(&format!("x{j}")).ok_or_else(|| Error::UnknownName(format!("x{j}")))?;
        let y = self.coord(&format!("y{j}")).ok_or_else(|| Error::UnknownName(format!("y{j}")))?;
        Ok(Expr::var(x) + Expr::i() * Expr::var(y))
    }

    pub fn zbar(&self, j: usize) -> Result<Expr> {
        Ok(self.z(j)?.conj())
    }

    pub fn mode(&self) -> FrameMode {
        self.mode
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coords(&self) -> impl Iterator<Item = &Var> {
        self.coords.iter().map(|(v, _)| v)
    }

    pub fn coord(&self, name: &str) -> Option<&Var> {
        self.coords().find(|v| v.name() == name)
    }

    /// `d e^b` for each basis covector.
    pub fn structure(&self) -> &[Form] {
        &self.structure
    }

    /// `d` of a scalar coefficient.
    pub fn d_scalar(&self, e: &Expr) -> Result<Form> {
        let mut r = Form::zero(&self.basis);
        if e.is_pointwise_constant() {
            return Ok(r);
        }
        if self.mode == FrameMode::Invariant {
            return Err(Error::PointDependentCoefficient(e.to_string()));
        }
        for (v, dv) in &self.coords {
            let de = e.diff(v);
            if !de.is_zero() {
                r = &r + &dv.scale(&de);
            }
        }
        Ok(r)
    }

    pub fn d(&self, f: &Form) -> Result<Form> {
        if !Basis::same(f.basis(), &self.basis) {
            return Err(Error::BasisMismatch);
        }
        let mut r = Form::zero(&self.basis);
        for (w, e) in f.terms() {
            let de = self.d_scalar(e)?;
            if !de.is_zero() {
                r = &r + &(&de ^ &Form::from_terms(&self.basis, [(w, Expr::one())]));
            }
            let dw = self.d_word(w);
            if !dw.is_zero() {
                r = &r + &dw.scale(e);
            }
        }
        Ok(r)
    }

    fn d_word(&self, w: Word) -> Form {
        if let Some(f) = self.cache.read().unwrap().get(&w) {
            return f.clone();
        }
        let idx = w.indices();
        let f = match idx.split_first() {
            None => Form::zero(&self.basis),
            Some((&a, [])) => self.structure[a].clone(),
            Some((&a, rest)) => {
                let tail = Word::from_indices(rest).unwrap().1;
                let ea = Form::covector(&self.basis, a);
                let et = Form::from_terms(&self.basis, [(tail, Expr::one())]);
                &(&self.structure[a] ^ &et) - &(&ea ^ &self.d_word(tail))
            }
        };
        self.cache.write().unwrap().insert(w, f.clone());
        f
    }

    /// `d∘d = 0` on every basis covector and every coordinate.
    pub fn check_d2(&self) -> Result<()> {
        for (b, s) in self.structure.iter().enumerate() {
            let dd = self.d(s)?;
            if !dd.is_zero() {
                return Err(Error::NotAComplex(format!("d(d {}) = {dd}", self.basis.name(b))));
            }
        }
        for (v, dv) in &self.coords {
            let dd = self.d(dv)?;
            if !dd.is_zero() {
                return Err(Error::NotAComplex(format!("d(d {v}) = {dd}")));
            }
        }
        Ok(())
    }

    /// `∂ = d^{p+1,q}` on a `(p,q)`-form over a complex basis.
    pub fn del(&self, f: &Form) -> Result<Form> {
        self.typed_d(f, 1, 0)
    }

    /// `∂̄ = d^{p,q+1}` on a `(p,q)`-form over a complex basis.
    pub fn delbar(&self, f: &Form) -> Result<Form> {
        self.typed_d(f, 0, 1)
    }

    fn typed_d(&self, f: &Form, dp: usize, dq: usize) -> Result<Form> {
        let mut r = Form::zero(&self.basis);
        for (p, q) in f.bidegrees()? {
            let part = f.bidegree_part(p, q)?;
            r = &r + &self.d(&part)?.bidegree_part(p + dp, q + dq)?;
        }
        Ok(r)
    }
}
