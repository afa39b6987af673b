//! Built-in manifold descriptions and their executable claims.
//!
//! Every built-in is an ordinary `.pk` file under `catalog/`, compiled into
//! the library so that it can be loaded by name.

mod claims;

pub use claims::{run_claim, run_claims, ClaimOutcome, ClaimsReport};

use crate::acs::{AlmostComplexStructure, DeformationFamily};
use crate::deform::MetricFamily;
use crate::dsl::load::{Env, Val};
use crate::dsl::{self, ClaimDecl, Diagnostic, Document, Span, Subst};
use crate::error::{Error, Result};
use crate::exterior::{Coframe, Form, Frame, Matrix};

/// A loaded description: the frame, the structure, an optional deformation
/// family with a metric, named forms, and claims.
#[derive(Clone, Debug)]
pub struct ManifoldSpec {
    pub name: String,
    /// Closed (compact without boundary), as integration arguments require.
    pub compact: bool,
    /// Coordinates or an invariant coframe; every form lives over its basis.
    pub frame: Frame,
    /// `J` as declared by an `acs` block.
    pub acs: Option<AlmostComplexStructure>,
    /// A `(1,0)`-coframe of the base structure.
    pub base: Coframe,
    pub family: Option<DeformationFamily>,
    /// The deformed coframe when every family parameter has been fixed by a
    /// substitution; `family` is then `None`.
    pub member: Option<Coframe>,
    pub metric: Option<MetricFamily>,
    /// Declared Hermitian coefficients, if any.
    pub hermitian: Option<Matrix>,
    pub forms: Vec<(String, Form)>,
    pub claims: Vec<ClaimDecl>,
    pub document: Document,
    pub subs: Subst,
    pub(crate) env: Env,
}

/// Shipped descriptions, by name.
pub const BUILTINS: [(&str, &str); 6] = [
    ("torus6", include_str!("../../catalog/torus6.pk")),
    ("sl2c", include_str!("../../catalog/sl2c.pk")),
    ("iwasawa", include_str!("../../catalog/iwasawa.pk")),
    ("heisenberg3", include_str!("../../catalog/heisenberg3.pk")),
    ("heisenberg4", include_str!("../../catalog/heisenberg4.pk")),
    ("c4_family", include_str!("../../catalog/c4_family.pk")),
];

/// Source text of a built-in. `heisenberg` is `heisenberg3`; `heisenbergN`
/// and `heisenberg(N)` are generated for any `N ≥ 2`.
pub fn builtin_source(name: &str) -> Result<String> {
    let key = if name == "heisenberg" { "heisenberg3" } else { name };
    if let Some((_, text)) = BUILTINS.iter().find(|(n, _)| *n == key) {
        return Ok(text.to_string());
    }
    let n = key
        .strip_prefix("heisenberg")
        .map(|s| s.trim_start_matches('(').trim_end_matches(')'))
        .and_then(|s| s.parse::<usize>().ok());
    match n {
        Some(n) if n >= 2 => Ok(heisenberg_source(n)),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// Parse and load a built-in.
pub fn builtin(name: &str) -> Result<ManifoldSpec> {
    let text = builtin_source(name)?;
    let doc = dsl::parse(&text).map_err(|d| Error::Invalid(render(&d)))?;
    dsl::load(&doc).map_err(|d| Error::Invalid(render(&d)))
}

pub(crate) fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

/// `dφⁿ = ½ Σ_{j<n} φ^j ∧ φ̄^j`, with one certificate `β_p` for each
/// `1 ≤ p ≤ n-1`.
pub fn heisenberg_source(n: usize) -> String {
    let mut s = format!("# complex Heisenberg group of dimension {n}\nspec heisenberg{n}\ncompact true\n\nstructure phi {n} {{\n");
    let pairs: Vec<String> = (1..n).map(|j| format!("phi{j}^phibar{j}")).collect();
    s.push_str(&format!("  dphi{n} = 1/2*({})\n}}\n\n", pairs.join(" + ")));
    for p in 1..n {
        let mut beta = format!("phi{n}");
        for j in 1..n - p {
            beta.push_str(&format!("^phi{j}^phibar{j}"));
        }
        s.push_str(&format!("form beta{p} = {beta}\n"));
    }
    s.push('\n');
    s.push_str("claim d2: d2() trivial \"Jacobi identity of the structure equations\"\n");
    for p in 1..n {
        s.push_str(&format!("claim nop{p}: nop(beta{p}, {p}) stated \"no almost {p}-Kahler form\"\n"));
    }
    s
}

impl ManifoldSpec {
    /// Parse and load `.pk` text.
    pub fn from_text(text: &str) -> std::result::Result<ManifoldSpec, Vec<Diagnostic>> {
        dsl::load(&dsl::parse(text)?)
    }

    /// Reload with substitutions added to the current ones; later entries win.
    pub fn with_subs(&self, extra: &Subst) -> std::result::Result<ManifoldSpec, Vec<Diagnostic>> {
        let mut subs: Subst = self.subs.iter().filter(|(n, _)| !extra.iter().any(|(m, _)| m == n)).cloned().collect();
        subs.extend(extra.iter().cloned());
        dsl::load_with(&self.document, &subs)
    }

    /// Canonical `.pk` text of the document this spec was loaded from.
    pub fn to_text(&self) -> String {
        dsl::print(&self.document)
    }

    /// `J` on the parent basis: the `acs` block if present, otherwise the
    /// structure of the base coframe.
    pub fn structure(&self) -> Result<AlmostComplexStructure> {
        match &self.acs {
            Some(j) => Ok(j.clone()),
            None => AlmostComplexStructure::from_coframe(&self.base),
        }
    }

    /// The deformed coframe when a family is declared (or fixed), otherwise
    /// the base.
    pub fn working_coframe(&self) -> Result<Coframe> {
        match (&self.family, &self.member) {
            (Some(f), _) => f.deformed(),
            (None, Some(m)) => Ok(m.clone()),
            (None, None) => Ok(self.base.clone()),
        }
    }

    /// `J_t` when a family is declared (or fixed), otherwise `J`.
    pub fn working_structure(&self) -> Result<AlmostComplexStructure> {
        match (&self.family, &self.member) {
            (Some(f), _) => f.reconstruct_jt(),
            (None, Some(m)) => AlmostComplexStructure::from_coframe(m),
            (None, None) => self.structure(),
        }
    }

    /// The frame induced on a coframe's basis.
    pub fn frame_on(&self, cf: &Coframe) -> Result<Frame> {
        Frame::induced(&self.frame, cf)
    }

    pub fn form(&self, name: &str) -> Option<&Form> {
        self.forms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Evaluate an expression written in the `.pk` language against this spec.
    pub fn eval_text(&self, text: &str) -> std::result::Result<Form, Vec<Diagnostic>> {
        let ast = dsl::parse_expr(text)?;
        self.env.eval_form(&ast, Span::new(1, 1)).map_err(|d| vec![d])
    }

    pub(crate) fn eval(&self, a: &dsl::Ast) -> std::result::Result<Val, Diagnostic> {
        self.env.eval(a, Span::default())
    }

    pub(crate) fn var(&self, name: &str) -> Option<crate::symexpr::Var> {
        self.env.var(name)
    }
}

#[cfg(test)]
mod tests;
