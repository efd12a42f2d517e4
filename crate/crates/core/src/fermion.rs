//! Ladder-operator algebra and Jordan-Wigner matrices.
//!
//! Two independent representations live here. [`LadderString`] reduces
//! products of creation and annihilation operators to normal order using
//! the canonical anticommutation relations only. The `jw_*` functions build
//! dense matrices from the Kronecker form `Z ⊗ … ⊗ Z ⊗ A ⊗ I ⊗ … ⊗ I`, with
//! qubit 0 the most significant factor.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{kron, CMat, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LadderKind {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub kind: LadderKind,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Ladder { mode, kind: LadderKind::Create }
    }

    pub fn annihilate(mode: usize) -> Self {
        Ladder { mode, kind: LadderKind::Annihilate }
    }

    pub fn adjoint(self) -> Self {
        let kind = match self.kind {
            LadderKind::Create => LadderKind::Annihilate,
            LadderKind::Annihilate => LadderKind::Create,
        };
        Ladder { mode: self.mode, kind }
    }
}

/// Product of ladder operators with a scalar, read left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderString {
    pub factors: Vec<Ladder>,
    pub scalar: C64,
}

impl LadderString {
    pub fn new(factors: Vec<Ladder>, scalar: C64) -> Self {
        LadderString { factors, scalar }
    }

    /// `a†_p a†_q a_r a_s`.
    pub fn two_body(p: usize, q: usize, r: usize, s: usize) -> Self {
        LadderString::new(
            vec![Ladder::create(p), Ladder::create(q), Ladder::annihilate(r), Ladder::annihilate(s)],
            ONE,
        )
    }

    /// `a†_p a_q`.
    pub fn one_body(p: usize, q: usize) -> Self {
        LadderString::new(vec![Ladder::create(p), Ladder::annihilate(q)], ONE)
    }

    pub fn adjoint(&self) -> Self {
        LadderString {
            factors: self.factors.iter().rev().map(|l| l.adjoint()).collect(),
            scalar: self.scalar.conj(),
        }
    }

    pub fn normal_ordered(&self) -> FermionOperator {
        let mut out = FermionOperator::default();
        let mut stack = vec![(self.scalar, self.factors.clone())];
        while let Some((c, ops)) = stack.pop() {
            if c == ZERO {
                continue;
            }
            match first_disorder(&ops) {
                None => out.add_monomial(&ops, c),
                Some(i) => {
                    let (a, b) = (ops[i], ops[i + 1]);
                    if a == b {
                        continue;
                    }
                    let mut swapped = ops.clone();
                    swapped.swap(i, i + 1);
                    stack.push((-c, swapped));
                    if a.mode == b.mode && a.kind != b.kind {
                        let mut contracted = ops.clone();
                        contracted.drain(i..i + 2);
                        stack.push((c, contracted));
                    }
                }
            }
        }
        out.prune();
        out
    }
}

fn rank_key(l: &Ladder) -> (u8, usize) {
    match l.kind {
        LadderKind::Create => (0, l.mode),
        LadderKind::Annihilate => (1, l.mode),
    }
}

fn first_disorder(ops: &[Ladder]) -> Option<usize> {
    ops.windows(2).position(|w| rank_key(&w[0]) >= rank_key(&w[1]))
}

/// Linear combination of normal-ordered monomials `a†… a…` with creators
/// and annihilators each ascending by mode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionOperator {
    pub terms: BTreeMap<(Vec<usize>, Vec<usize>), C64>,
}

impl FermionOperator {
    fn add_monomial(&mut self, ops: &[Ladder], c: C64) {
        let cre = ops.iter().filter(|l| l.kind == LadderKind::Create).map(|l| l.mode).collect();
        let ann = ops.iter().filter(|l| l.kind == LadderKind::Annihilate).map(|l| l.mode).collect();
        *self.terms.entry((cre, ann)).or_insert(ZERO) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > 1e-14);
    }

    pub fn add(&mut self, other: &FermionOperator) {
        for (k, v) in &other.terms {
            *self.terms.entry(k.clone()).or_insert(ZERO) += *v;
        }
        self.prune();
    }

    pub fn scaled(&self, c: C64) -> FermionOperator {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max coefficient deviation between two operators.
    pub fn distance(&self, other: &FermionOperator) -> f64 {
        let mut d: f64 = 0.0;
        for (k, v) in &self.terms {
            let w = other.terms.get(k).copied().unwrap_or(ZERO);
            d = d.max((v - w).norm());
        }
        for (k, w) in &other.terms {
            if !self.terms.contains_key(k) {
                d = d.max(w.norm());
            }
        }
        d
    }
}

/// `L + L†` for the given string, normal ordered.
pub fn hermitian_pair(l: &LadderString) -> FermionOperator {
    let mut op = l.normal_ordered();
    op.add(&l.adjoint().normal_ordered());
    op
}

fn check_cap(m: usize) -> Result<()> {
    let cap = crate::sim::cap();
    if m > cap {
        return Err(Error::Cap { needed: m, cap });
    }
    Ok(())
}

fn single(entries: [C64; 4]) -> CMat {
    CMat::from_row_slice(2, 2, &entries)
}

/// `a_k` on `m` modes as `Z^{⊗k} ⊗ A ⊗ I^{⊗(m-k-1)}`.
pub fn jw_annihilator(k: usize, m: usize) -> Result<CMat> {
    if k >= m {
        return Err(Error::Range { index: k, m });
    }
    check_cap(m)?;
    let z = single([ONE, ZERO, ZERO, -ONE]);
    let a = single([ZERO, ONE, ZERO, ZERO]);
    let id = single([ONE, ZERO, ZERO, ONE]);
    let mut out = CMat::identity(1, 1);
    for j in 0..m {
        let f = if j < k {
            &z
        } else if j == k {
            &a
        } else {
            &id
        };
        out = kron(&out, f);
    }
    Ok(out)
}

pub fn jw_creator(k: usize, m: usize) -> Result<CMat> {
    Ok(jw_annihilator(k, m)?.adjoint())
}

/// Dense matrix of a ladder string on `m` modes.
pub fn ladder_matrix(l: &LadderString, m: usize) -> Result<CMat> {
    check_cap(m)?;
    let dim = 1usize << m;
    let mut out = CMat::identity(dim, dim) * l.scalar;
    for f in &l.factors {
        let op = match f.kind {
            LadderKind::Create => jw_creator(f.mode, m)?,
            LadderKind::Annihilate => jw_annihilator(f.mode, m)?,
        };
        out *= op;
    }
    Ok(out)
}

/// Dense matrix of a normal-ordered operator.
pub fn operator_matrix(op: &FermionOperator, m: usize) -> Result<CMat> {
    check_cap(m)?;
    let dim = 1usize << m;
    let mut out = CMat::zeros(dim, dim);
    for ((cre, ann), c) in &op.terms {
        let mut factors: Vec<Ladder> = cre.iter().map(|&k| Ladder::create(k)).collect();
        factors.extend(ann.iter().map(|&k| Ladder::annihilate(k)));
        out += ladder_matrix(&LadderString::new(factors, *c), m)?;
    }
    Ok(out)
}

/// Signed basis-state permutation for the relative layout change
/// `new[i] = old[perm[i]]`. Each occupied pair whose relative order flips
/// contributes a factor -1, matching a product of swap-then-CZ gates.
pub fn fermionic_permutation_matrix(perm: &[usize], m: usize) -> Result<CMat> {
    check_cap(m)?;
    if perm.len() != m {
        return Err(Error::Argument("permutation length differs from mode count".into()));
    }
    let mut seen = vec![false; m];
    for &p in perm {
        if p >= m || seen[p] {
            return Err(Error::Argument("not a bijection".into()));
        }
        seen[p] = true;
    }
    let dim = 1usize << m;
    let mut out = CMat::zeros(dim, dim);
    let bit = |state: usize, wire: usize| (state >> (m - 1 - wire)) & 1;
    for col in 0..dim {
        let mut row = 0usize;
        for i in 0..m {
            row |= bit(col, perm[i]) << (m - 1 - i);
        }
        let mut inversions = 0usize;
        for i in 0..m {
            if bit(row, i) == 0 {
                continue;
            }
            for j in i + 1..m {
                if bit(row, j) == 1 && perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        out[(row, col)] = if inversions.is_multiple_of(2) { ONE } else { -ONE };
    }
    Ok(out)
}

/// Applies a ladder string to a computational basis state of `k` local
/// modes (mode 0 is the most significant bit). Returns the sign and the
/// resulting state, or `None` when the state is annihilated.
pub fn act_on_basis(factors: &[Ladder], state: u32, k: usize) -> Option<(f64, u32)> {
    let mut s = state;
    let mut sign = 1.0;
    for f in factors.iter().rev() {
        let mask = 1u32 << (k - 1 - f.mode);
        let occupied = s & mask != 0;
        match (f.kind, occupied) {
            (LadderKind::Create, true) | (LadderKind::Annihilate, false) => return None,
            _ => {}
        }
        let before = if f.mode == 0 { 0 } else { (s >> (k - f.mode)).count_ones() };
        if before % 2 == 1 {
            sign = -sign;
        }
        s ^= mask;
    }
    Some((sign, s))
}
