use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Type of a basis covector relative to the almost complex structure in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Holomorphic,
    Antiholomorphic,
    Real,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Covector {
    pub name: String,
    pub tag: Tag,
    /// Index of the conjugate covector; a real covector is its own conjugate.
    pub conj: usize,
}

/// An ordered covector basis. At most 64 covectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    covectors: Vec<Covector>,
}

impl Basis {
    /// Real covectors, each its own conjugate.
    pub fn real<S: AsRef<str>>(names: &[S]) -> Arc<Basis> {
        let covectors = names
            .iter()
            .enumerate()
            .map(|(i, n)| Covector { name: n.as_ref().to_string(), tag: Tag::Real, conj: i })
            .collect();
        Basis::from_covectors(covectors)
    }

    /// `n` holomorphic covectors followed by their `n` conjugates.
    pub fn complex<S: AsRef<str>>(holo: &[S], anti: &[S]) -> Arc<Basis> {
        assert_eq!(holo.len(), anti.len(), "conjugate names must pair up");
        let n = holo.len();
        let mut covectors = Vec::with_capacity(2 * n);
        for (j, h) in holo.iter().enumerate() {
            covectors.push(Covector { name: h.as_ref().into(), tag: Tag::Holomorphic, conj: n + j });
        }
        for (j, a) in anti.iter().enumerate() {
            covectors.push(Covector { name: a.as_ref().into(), tag: Tag::Antiholomorphic, conj: j });
        }
        Basis::from_covectors(covectors)
    }

    /// `phi1..phin, phibar1..phibarn` style names from a stem.
    pub fn complex_named(stem: &str, n: usize) -> Arc<Basis> {
        let holo: Vec<String> = (1..=n).map(|j| format!("{stem}{j}")).collect();
        let anti: Vec<String> = (1..=n).map(|j| format!("{stem}bar{j}")).collect();
        Basis::complex(&holo, &anti)
    }

    pub fn from_covectors(covectors: Vec<Covector>) -> Arc<Basis> {
        assert!(covectors.len() <= 64, "at most 64 basis covectors");
        for (i, c) in covectors.iter().enumerate() {
            assert_eq!(covectors[c.conj].conj, i, "conjugation must be an involution");
            let expected = match c.tag {
                Tag::Real => Tag::Real,
                Tag::Holomorphic => Tag::Antiholomorphic,
                Tag::Antiholomorphic => Tag::Holomorphic,
            };
            assert_eq!(covectors[c.conj].tag, expected, "conjugation must swap types");
            assert!(c.tag != Tag::Real || c.conj == i, "real covectors are self-conjugate");
        }
        Arc::new(Basis { covectors })
    }

    pub fn dim(&self) -> usize {
        self.covectors.len()
    }

    pub fn covector(&self, i: usize) -> &Covector {
        &self.covectors[i]
    }

    pub fn covectors(&self) -> &[Covector] {
        &self.covectors
    }

    pub fn name(&self, i: usize) -> &str {
        &self.covectors[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.covectors.iter().position(|c| c.name == name)
    }

    pub fn conj_index(&self, i: usize) -> usize {
        self.covectors[i].conj
    }

    pub fn tag(&self, i: usize) -> Tag {
        self.covectors[i].tag
    }

    /// True when every covector is holomorphic or antiholomorphic.
    pub fn is_complex(&self) -> bool {
        self.covectors.iter().all(|c| c.tag != Tag::Real)
    }

    /// Indices of the holomorphic covectors, in order.
    pub fn holomorphic(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.tag(i) == Tag::Holomorphic).collect()
    }

    pub fn same(a: &Arc<Basis>, b: &Arc<Basis>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.covectors.iter().map(|c| c.name.as_str()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}
