//! Molecular Hamiltonians in second quantization.
//!
//! A stored one-body entry `(p, q)` stands for `h (a†_p a_q + a†_q a_p)` and
//! a stored two-body entry `(p, q, r, s)` for
//! `h (a†_p a†_q a_r a_s + a†_s a†_r a_q a_p)`. Two-body keys are kept in a
//! canonical form so that rearrangements of the same physical term merge.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::fermion::{hermitian_pair, FermionOperator, LadderString};
use crate::linalg::{CMat, C64};

/// Index rearrangements of `(p, q, r, s)` that map the Hermitian two-body
/// term onto plus or minus itself: `(positions, sign)` with the image tuple
/// `(t[pos[0]], t[pos[1]], t[pos[2]], t[pos[3]])`.
pub const TWO_BODY_SYMMETRIES: [([usize; 4], f64); 8] = [
    ([0, 1, 2, 3], 1.0),
    ([3, 2, 1, 0], 1.0),
    ([1, 0, 2, 3], -1.0),
    ([0, 1, 3, 2], -1.0),
    ([1, 0, 3, 2], 1.0),
    ([3, 2, 0, 1], -1.0),
    ([2, 3, 1, 0], -1.0),
    ([2, 3, 0, 1], 1.0),
];

/// Canonical key and sign for a two-body index tuple, or `None` when the
/// ladder string vanishes (`p = q` or `r = s`). The canonical key has
/// `p < q`, `r > s` and is lexicographically smallest among its images.
pub fn canonical_two_body(t: [usize; 4]) -> Option<([usize; 4], f64)> {
    if t[0] == t[1] || t[2] == t[3] {
        return None;
    }
    TWO_BODY_SYMMETRIES
        .iter()
        .map(|(pos, sign)| ([t[pos[0]], t[pos[1]], t[pos[2]], t[pos[3]]], *sign))
        .filter(|(k, _)| k[0] < k[1] && k[2] > k[3])
        .min_by(|a, b| a.0.cmp(&b.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermClass {
    Singleton,
    Pair,
    Triple,
    Quad,
}

impl TermClass {
    pub fn from_support_size(n: usize) -> Option<Self> {
        match n {
            1 => Some(TermClass::Singleton),
            2 => Some(TermClass::Pair),
            3 => Some(TermClass::Triple),
            4 => Some(TermClass::Quad),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TermClass::Singleton => "singleton",
            TermClass::Pair => "pair",
            TermClass::Triple => "triple",
            TermClass::Quad => "quad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermIndices {
    One(usize, usize),
    Two([usize; 4]),
}

/// One stored Hermitian term with its coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub indices: TermIndices,
    pub coeff: f64,
}

impl Term {
    pub fn one_body(p: usize, q: usize, coeff: f64) -> Self {
        Term { indices: TermIndices::One(p.min(q), p.max(q)), coeff }
    }

    /// Builds a canonical two-body term, folding the rearrangement sign into
    /// the coefficient. Returns `None` for vanishing index patterns.
    pub fn two_body(t: [usize; 4], coeff: f64) -> Option<Self> {
        canonical_two_body(t).map(|(k, s)| Term { indices: TermIndices::Two(k), coeff: coeff * s })
    }

    /// The ladder string `L` with the term equal to `coeff (L + L†)`.
    pub fn ladder(&self) -> LadderString {
        match self.indices {
            TermIndices::One(p, q) => LadderString::one_body(p, q),
            TermIndices::Two([p, q, r, s]) => LadderString::two_body(p, q, r, s),
        }
    }

    pub fn support(&self) -> SmallVec<[usize; 4]> {
        let mut v: SmallVec<[usize; 4]> = match self.indices {
            TermIndices::One(p, q) => [p, q].into_iter().collect(),
            TermIndices::Two(t) => t.into_iter().collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn class(&self) -> TermClass {
        TermClass::from_support_size(self.support().len()).expect("support size 1..=4")
    }

    /// Max index touched.
    pub fn max_index(&self) -> usize {
        self.support().iter().copied().max().unwrap_or(0)
    }

    /// Normal-ordered symbolic operator including the coefficient.
    pub fn operator(&self) -> FermionOperator {
        hermitian_pair(&self.ladder()).scaled(C64::new(self.coeff, 0.0))
    }

    /// Dense Jordan-Wigner matrix of the full Hermitian term.
    pub fn matrix(&self, m: usize) -> Result<CMat> {
        let l = self.ladder();
        let mut a = crate::fermion::ladder_matrix(&l, m)?;
        a += a.adjoint();
        Ok(a * C64::new(self.coeff, 0.0))
    }
}

/// Term together with its class and sorted support.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedTerm {
    pub class: TermClass,
    pub term: Term,
    pub support: SmallVec<[usize; 4]>,
    pub coefficient: f64,
}

/// Canonical keys of every term that can live on a sorted support, in the
/// fixed application order used by templates and the Trotter step.
pub fn support_keys(support: &[usize]) -> SmallVec<[TermIndices; 3]> {
    let mut out = SmallVec::new();
    match *support {
        [p] => out.push(TermIndices::One(p, p)),
        [p, q] => {
            out.push(TermIndices::One(p, q));
            out.push(TermIndices::Two([p, q, q, p]));
        }
        [a, b, c] => {
            for (x, u, v) in [(a, b, c), (b, a, c), (c, a, b)] {
                let (k, _) = canonical_two_body([u, x, x, v]).expect("distinct indices");
                out.push(TermIndices::Two(k));
            }
        }
        [a, b, c, d] => {
            for (p, q, r, s) in [(a, b, c, d), (a, c, b, d), (a, d, b, c)] {
                let (k, _) = canonical_two_body([p, q, s, r]).expect("distinct indices");
                out.push(TermIndices::Two(k));
            }
        }
        _ => {}
    }
    out
}

/// Anything that can report the terms living on a given support.
pub trait TermSource {
    fn orbitals(&self) -> usize;

    /// Terms whose support is exactly `support` (sorted), in the order of
    /// [`support_keys`]; zero coefficients are omitted.
    fn terms_on(&self, support: &[usize]) -> SmallVec<[Term; 3]>;
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MolecularHamiltonian {
    m: usize,
    one_body: BTreeMap<(usize, usize), f64>,
    two_body: BTreeMap<[usize; 4], f64>,
}

impl MolecularHamiltonian {
    pub fn new(m: usize) -> Self {
        MolecularHamiltonian { m, ..Default::default() }
    }

    pub fn orbitals(&self) -> usize {
        self.m
    }

    fn check(&self, idx: &[usize], v: f64) -> Result<()> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.m) {
            return Err(Error::Range { index: bad, m: self.m });
        }
        if !v.is_finite() {
            return Err(Error::Value(v));
        }
        Ok(())
    }

    /// Adds `v` to the one-body term on `(p, q)`.
    pub fn add_one_body(&mut self, p: usize, q: usize, v: f64) -> Result<()> {
        self.check(&[p, q], v)?;
        *self.one_body.entry((p.min(q), p.max(q))).or_insert(0.0) += v;
        Ok(())
    }

    /// Adds `v` to the two-body term on `(p, q, r, s)` after canonicalizing.
    pub fn add_two_body(&mut self, t: [usize; 4], v: f64) -> Result<()> {
        self.check(&t, v)?;
        let (k, sign) = canonical_two_body(t)
            .ok_or_else(|| Error::ZeroTerm(format!("2b {} {} {} {}", t[0], t[1], t[2], t[3])))?;
        *self.two_body.entry(k).or_insert(0.0) += sign * v;
        Ok(())
    }

    pub fn add_term(&mut self, term: Term) -> Result<()> {
        match term.indices {
            TermIndices::One(p, q) => self.add_one_body(p, q, term.coeff),
            TermIndices::Two(t) => self.add_two_body(t, term.coeff),
        }
    }

    pub fn one_body(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.one_body
    }

    pub fn two_body(&self) -> &BTreeMap<[usize; 4], f64> {
        &self.two_body
    }

    pub fn len(&self) -> usize {
        self.one_body.len() + self.two_body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every stored term, one-body first, in key order.
    pub fn terms(&self) -> Vec<Term> {
        let mut out: Vec<Term> =
            self.one_body.iter().map(|(&(p, q), &v)| Term { indices: TermIndices::One(p, q), coeff: v }).collect();
        out.extend(self.two_body.iter().map(|(&k, &v)| Term { indices: TermIndices::Two(k), coeff: v }));
        out
    }

    pub fn coefficient(&self, key: TermIndices) -> Option<f64> {
        match key {
            TermIndices::One(p, q) => self.one_body.get(&(p, q)).copied(),
            TermIndices::Two(k) => self.two_body.get(&k).copied(),
        }
    }

    /// Dense Jordan-Wigner matrix of the whole Hamiltonian.
    pub fn matrix(&self) -> Result<CMat> {
        let dim = 1usize << self.m;
        let mut out = CMat::zeros(dim, dim);
        for t in self.terms() {
            out += t.matrix(self.m)?;
        }
        Ok(out)
    }

    /// Normal-ordered symbolic form of the whole Hamiltonian.
    pub fn operator(&self) -> FermionOperator {
        let mut op = FermionOperator::default();
        for t in self.terms() {
            op.add(&t.operator());
        }
        op
    }
}

impl TermSource for MolecularHamiltonian {
    fn orbitals(&self) -> usize {
        self.m
    }

    fn terms_on(&self, support: &[usize]) -> SmallVec<[Term; 3]> {
        support_keys(support)
            .into_iter()
            .filter_map(|k| self.coefficient(k).filter(|v| *v != 0.0).map(|v| Term { indices: k, coeff: v }))
            .collect()
    }
}

/// Dense synthetic Hamiltonian with every allowed term present. Values are
/// 1, or with `hashed` a deterministic hash of the key and seed in
/// `[0.5, 1.5)`; nothing is stored, so very large orbital counts stay cheap.
#[derive(Debug, Clone, Copy)]
pub struct DenseSynthetic {
    pub m: usize,
    pub seed: u64,
    pub hashed: bool,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl DenseSynthetic {
    pub fn unit(m: usize) -> Self {
        DenseSynthetic { m, seed: 0, hashed: false }
    }

    pub fn hashed(m: usize, seed: u64) -> Self {
        DenseSynthetic { m, seed, hashed: true }
    }

    fn value(&self, key: TermIndices) -> f64 {
        if !self.hashed {
            return 1.0;
        }
        let mut h = splitmix(self.seed);
        let parts: [usize; 5] = match key {
            TermIndices::One(p, q) => [1, p, q, 0, 0],
            TermIndices::Two([p, q, r, s]) => [2, p, q, r, s],
        };
        for x in parts {
            h = splitmix(h ^ x as u64);
        }
        0.5 + (h >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Materializes the Hamiltonian (small `m` only).
    pub fn to_hamiltonian(&self) -> MolecularHamiltonian {
        let mut h = MolecularHamiltonian::new(self.m);
        for support in crate::schedule::all_supports(self.m) {
            for t in self.terms_on(&support) {
                h.add_term(t).expect("valid synthetic term");
            }
        }
        h
    }
}

impl TermSource for DenseSynthetic {
    fn orbitals(&self) -> usize {
        self.m
    }

    fn terms_on(&self, support: &[usize]) -> SmallVec<[Term; 3]> {
        support_keys(support).into_iter().map(|k| Term { indices: k, coeff: self.value(k) }).collect()
    }
}

/// Classifies every stored term by the number of distinct orbitals.
pub fn classify_terms(h: &MolecularHamiltonian) -> Vec<ClassifiedTerm> {
    h.terms()
        .into_iter()
        .map(|t| {
            let support = t.support();
            ClassifiedTerm { class: t.class(), term: t, support, coefficient: t.coeff }
        })
        .collect()
}

/// Parse error with a 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub error: Error,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "line {}: {}", self.line, self.error)
    }
}

impl core::error::Error for ParseError {}

/// Parses the line-oriented coefficient format (`m`, `1b`, `2b` records).
pub fn parse_hamiltonian(text: &str) -> core::result::Result<MolecularHamiltonian, ParseError> {
    let mut h: Option<MolecularHamiltonian> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |e: Error| ParseError { line, error: e };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let int = |s: &str| s.parse::<usize>().map_err(|_| err(Error::Argument(format!("bad index `{s}`"))));
        let real = |s: &str| s.parse::<f64>().map_err(|_| err(Error::Argument(format!("bad value `{s}`"))));
        match (fields[0], h.as_mut()) {
            ("m", None) if fields.len() == 2 => {
                let m = int(fields[1])?;
                if m == 0 {
                    return Err(err(Error::Argument("m must be positive".into())));
                }
                h = Some(MolecularHamiltonian::new(m));
            }
            ("1b", Some(h)) if fields.len() == 4 => {
                let (p, q, v) = (int(fields[1])?, int(fields[2])?, real(fields[3])?);
                h.add_one_body(p, q, v).map_err(err)?;
            }
            ("2b", Some(h)) if fields.len() == 6 => {
                let t = [int(fields[1])?, int(fields[2])?, int(fields[3])?, int(fields[4])?];
                h.add_two_body(t, real(fields[5])?).map_err(err)?;
            }
            (_, None) => return Err(err(Error::Argument("expected `m <int>` first".into()))),
            _ => return Err(err(Error::Argument(format!("malformed record `{body}`")))),
        }
    }
    h.ok_or(ParseError { line: 0, error: Error::Argument("missing `m` line".into()) })
}

/// Emits the line-oriented coefficient format; values round-trip exactly.
pub fn emit_hamiltonian(h: &MolecularHamiltonian) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "m {}", h.m);
    for (&(p, q), &v) in &h.one_body {
        let _ = writeln!(out, "1b {p} {q} {v:e}");
    }
    for (&[p, q, r, s], &v) in &h.two_body {
        let _ = writeln!(out, "2b {p} {q} {r} {s} {v:e}");
    }
    out
}
