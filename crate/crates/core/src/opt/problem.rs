use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{FactorEncoding, OptError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// Multiplier turning the objective into an energy to minimise.
    pub fn energy_sign(self) -> f64 {
        match self {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }

    /// True when `a` is a strictly better objective than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    MaxCut,
    Matching,
    Hobo,
    Factorization,
    LinearSystem,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::MaxCut => "maxcut",
            Family::Matching => "matching",
            Family::Hobo => "hobo",
            Family::Factorization => "factorization",
            Family::LinearSystem => "linear_system",
            Family::Custom => "custom",
        })
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "maxcut" | "max_cut" => Family::MaxCut,
            "matching" => Family::Matching,
            "hobo" => Family::Hobo,
            "factorization" | "factor" => Family::Factorization,
            "linear_system" | "linear" => Family::LinearSystem,
            "custom" => Family::Custom,
            other => return Err(format!("unknown family `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of variables before quadratization added ancillas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_vars: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorization: Option<FactorEncoding>,
}

impl ProblemMeta {
    pub fn new(family: Family) -> Self {
        Self { family, seed: None, original_vars: None, factorization: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Multilinear polynomial over binary variables. Monomials are sorted,
/// duplicate-free variable lists; `x * x = x` is applied on multiplication.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Vec<usize>, f64>,
}

impl Polynomial {
    pub fn constant(c: f64) -> Self {
        let mut p = Self::default();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut p = Self::default();
        p.add_term(vec![i], 1.0);
        p
    }

    /// Adds `coef * prod(vars)`; `vars` may be unsorted or repeat.
    pub fn add_term(&mut self, mut vars: Vec<usize>, coef: f64) {
        vars.sort_unstable();
        vars.dedup();
        let e = self.terms.entry(vars).or_insert(0.0);
        *e += coef;
        if *e == 0.0 {
            let key: Vec<Vec<usize>> = self.terms.iter().filter(|(_, &v)| v == 0.0).map(|(k, _)| k.clone()).collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&mut self, other: &Polynomial) {
        for (k, &v) in &other.terms {
            self.add_term(k.clone(), v);
        }
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut p = Polynomial::default();
        for (k, &v) in &self.terms {
            p.add_term(k.clone(), v * s);
        }
        p
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut p = Polynomial::default();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let mut vars = a.clone();
                vars.extend_from_slice(b);
                p.add_term(vars, ca * cb);
            }
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Vec<usize>, f64> {
        self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }
}

/// One monomial as it appears in problem documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub vars: Vec<usize>,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProblemDocument {
    num_vars: usize,
    sense: Sense,
    degree: usize,
    terms: Vec<Term>,
    meta: ProblemMeta,
}

/// Pseudo-Boolean objective `sum_T c_T prod_{i in T} x_i` with a sense.
/// The empty monomial is the constant term. Degree at most 2 is a QUBO.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemDocument", into = "ProblemDocument")]
pub struct PseudoBooleanProblem {
    num_vars: usize,
    sense: Sense,
    poly: Polynomial,
    meta: ProblemMeta,
}

impl TryFrom<ProblemDocument> for PseudoBooleanProblem {
    type Error = OptError;
    fn try_from(d: ProblemDocument) -> Result<Self> {
        let p = Self::new(d.num_vars, d.terms.into_iter().map(|t| (t.vars, t.coef)), d.sense, d.meta)?;
        if p.degree() != d.degree {
            return Err(OptError::InvalidProblem(format!("declared degree {} but terms have degree {}", d.degree, p.degree())));
        }
        Ok(p)
    }
}

impl From<PseudoBooleanProblem> for ProblemDocument {
    fn from(p: PseudoBooleanProblem) -> Self {
        ProblemDocument {
            num_vars: p.num_vars,
            sense: p.sense,
            degree: p.degree(),
            terms: p.poly.terms.iter().map(|(k, &c)| Term { vars: k.clone(), coef: c }).collect(),
            meta: p.meta,
        }
    }
}

impl PseudoBooleanProblem {
    pub fn new<I>(num_vars: usize, terms: I, sense: Sense, meta: ProblemMeta) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut poly = Polynomial::default();
        for (vars, coef) in terms {
            if !coef.is_finite() {
                return Err(OptError::InvalidProblem(format!("coefficient {coef} is not finite")));
            }
            if let Some(&v) = vars.iter().find(|&&v| v >= num_vars) {
                return Err(OptError::InvalidProblem(format!("variable {v} out of range for {num_vars} variables")));
            }
            poly.add_term(vars, coef);
        }
        Ok(Self { num_vars, sense, poly, meta })
    }

    pub fn from_polynomial(num_vars: usize, poly: Polynomial, sense: Sense, meta: ProblemMeta) -> Result<Self> {
        Self::new(num_vars, poly.into_terms(), sense, meta)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut ProblemMeta {
        &mut self.meta
    }

    pub fn family(&self) -> Family {
        self.meta.family
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.poly.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn is_qubo(&self) -> bool {
        self.degree() <= 2
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<f64> {
        if a.len() != self.num_vars {
            return Err(OptError::LengthMismatch { expected: self.num_vars, found: a.len() });
        }
        Ok(self.evaluate_bits(a.bits()))
    }

    pub(crate) fn evaluate_bits(&self, bits: &[bool]) -> f64 {
        self.poly.terms.iter().filter(|(vars, _)| vars.iter().all(|&v| bits[v])).map(|(_, &c)| c).sum()
    }

    /// Largest absolute non-constant coefficient.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.poly.terms.iter().filter(|(k, _)| !k.is_empty()).map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }
}

/// Bit vector assignment, written as a `0`/`1` string in documents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// Low `n` bits of `mask`, bit `i` giving variable `i`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| !b).collect())
    }

    /// First `n` variables, dropping ancillas.
    pub fn project(&self, n: usize) -> Self {
        Self(self.0[..n.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit `{other}`")),
            })
            .collect::<Result<Vec<bool>, _>>()
            .map(Assignment)
    }
}

impl TryFrom<String> for Assignment {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Assignment> for String {
    fn from(a: Assignment) -> Self {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_multilinear() {
        // (x0 + x1)^2 = x0 + x1 + 2 x0 x1
        let mut p = Polynomial::var(0);
        p.add(&Polynomial::var(1));
        let sq = p.mul(&p);
        assert_eq!(sq.terms().get(&vec![0]), Some(&1.0));
        assert_eq!(sq.terms().get(&vec![1]), Some(&1.0));
        assert_eq!(sq.terms().get(&vec![0, 1]), Some(&2.0));
        let mut z = Polynomial::var(3);
        z.add(&Polynomial::var(3).scale(-1.0));
        assert!(z.terms().is_empty());
    }

    #[test]
    fn evaluates_and_checks_length() {
        let p = PseudoBooleanProblem::new(3, [(vec![0, 1], 2.0), (vec![2], -1.0), (vec![], 0.5)], Sense::Minimize, ProblemMeta::new(Family::Custom))
            .unwrap();
        assert_eq!(p.evaluate(&"110".parse().unwrap()).unwrap(), 2.5);
        assert_eq!(p.evaluate(&"001".parse().unwrap()).unwrap(), -0.5);
        assert_eq!(p.evaluate(&Assignment::zeros(2)), Err(OptError::LengthMismatch { expected: 3, found: 2 }));
        assert!(PseudoBooleanProblem::new(2, [(vec![5], 1.0)], Sense::Minimize, ProblemMeta::new(Family::Custom)).is_err());
    }

    #[test]
    fn duplicate_terms_merge() {
        let p = PseudoBooleanProblem::new(2, [(vec![1, 0], 1.0), (vec![0, 1], 1.0), (vec![0, 0], 3.0)], Sense::Minimize, ProblemMeta::new(Family::Custom))
            .unwrap();
        let terms: Vec<_> = p.terms().collect();
        assert_eq!(terms, vec![(&[0usize][..], 3.0), (&[0usize, 1][..], 2.0)]);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn document_round_trip() {
        let p = PseudoBooleanProblem::new(3, [(vec![0, 1, 2], -1.0), (vec![1], 0.25)], Sense::Maximize, ProblemMeta::new(Family::Hobo).with_seed(9))
            .unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""num_vars":3"#) && json.contains(r#""sense":"maximize""#) && json.contains(r#""degree":3"#));
        let back: PseudoBooleanProblem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let lying = json.replace(r#""degree":3"#, r#""degree":2"#);
        assert!(serde_json::from_str::<PseudoBooleanProblem>(&lying).is_err());
    }

    #[test]
    fn assignment_strings() {
        let a: Assignment = "1011".parse().unwrap();
        assert_eq!(a.to_string(), "1011");
        assert_eq!(a.complement().to_string(), "0100");
        assert_eq!(Assignment::from_mask(0b1101, 4).to_string(), "1011");
        assert!("10x".parse::<Assignment>().is_err());
    }
}
