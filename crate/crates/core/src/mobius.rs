//! Möbius transformations `z ↦ (az + b)/(cz + d)` on the projective line
//! `F_p ∪ {∞}`. Points are `0..p` with `p` standing for `∞`.

use alloc::vec;
use alloc::vec::Vec;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest odd prime `p ≥ max(m - 1, 3)`.
pub fn scheduling_prime(m: usize) -> u32 {
    let mut p = (m.saturating_sub(1)).max(3) as u64;
    while !(is_prime(p) && p % 2 == 1) {
        p += 1;
    }
    p as u32
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn inv_mod(x: u32, p: u32) -> u32 {
    debug_assert!(!x.is_multiple_of(p));
    pow_mod(x as u64, p as u64 - 2, p as u64) as u32
}

/// Nonzero square modulo `p`.
pub fn is_quadratic_residue(x: u32, p: u32) -> bool {
    !x.is_multiple_of(p) && pow_mod(x as u64, (p as u64 - 1) / 2, p as u64) == 1
}

/// Projective 2x2 matrix over `F_p`, stored normalized so the first
/// nonzero entry of `(a, b, c, d)` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MobiusMap {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub p: u32,
}

impl MobiusMap {
    pub fn new(a: u32, b: u32, c: u32, d: u32, p: u32) -> Option<Self> {
        let m = MobiusMap { a: a % p, b: b % p, c: c % p, d: d % p, p };
        (m.det() != 0).then(|| m.normalized())
    }

    pub fn identity(p: u32) -> Self {
        MobiusMap { a: 1, b: 0, c: 0, d: 1, p }
    }

    fn mul(&self, x: u32, y: u32) -> u32 {
        ((x as u64 * y as u64) % self.p as u64) as u32
    }

    fn add(&self, x: u32, y: u32) -> u32 {
        ((x as u64 + y as u64) % self.p as u64) as u32
    }

    fn sub(&self, x: u32, y: u32) -> u32 {
        ((x as u64 + self.p as u64 - y as u64) % self.p as u64) as u32
    }

    pub fn det(&self) -> u32 {
        self.sub(self.mul(self.a, self.d), self.mul(self.b, self.c))
    }

    pub fn trace(&self) -> u32 {
        self.add(self.a, self.d)
    }

    pub fn normalized(self) -> Self {
        let lead = [self.a, self.b, self.c, self.d].into_iter().find(|&x| x != 0).expect("nonzero matrix");
        let s = inv_mod(lead, self.p);
        MobiusMap { a: self.mul(self.a, s), b: self.mul(self.b, s), c: self.mul(self.c, s), d: self.mul(self.d, s), p: self.p }
    }

    /// Whether the determinant is a quadratic residue. Rescaling by `λ`
    /// multiplies it by `λ²`, so this is well defined projectively.
    pub fn has_residue_determinant(&self) -> bool {
        is_quadratic_residue(self.det(), self.p)
    }

    pub fn is_identity(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    /// Image of a point; `p` is `∞`.
    pub fn apply(&self, z: u32) -> u32 {
        let p = self.p;
        if z == p {
            return if self.c == 0 { p } else { self.mul(self.a, inv_mod(self.c, p)) };
        }
        let den = self.add(self.mul(self.c, z), self.d);
        if den == 0 {
            return p;
        }
        self.mul(self.add(self.mul(self.a, z), self.b), inv_mod(den, p))
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &MobiusMap) -> MobiusMap {
        let f = |x: u32, y: u32, z: u32, w: u32| self.add(self.mul(x, y), self.mul(z, w));
        MobiusMap {
            a: f(self.a, o.a, self.b, o.c),
            b: f(self.a, o.b, self.b, o.d),
            c: f(self.c, o.a, self.d, o.c),
            d: f(self.c, o.b, self.d, o.d),
            p: self.p,
        }
        .normalized()
    }

    pub fn inverse(&self) -> MobiusMap {
        let p = self.p;
        MobiusMap { a: self.d, b: (p - self.b) % p, c: (p - self.c) % p, d: self.a, p }.normalized()
    }

    /// Projective order, by repeated composition.
    pub fn order(&self) -> usize {
        let mut g = *self;
        let mut k = 1;
        while !g.is_identity() {
            g = g.compose(self);
            k += 1;
        }
        k
    }

    /// Orbits on `F_p ∪ {∞}`, each starting at its smallest point, sorted by
    /// that point.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let n = self.p as usize + 1;
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start as usize] = true;
            let mut z = self.apply(start);
            while z != start {
                seen[z as usize] = true;
                orbit.push(z);
                z = self.apply(z);
            }
            out.push(orbit);
        }
        out
    }

    fn tuple(&self) -> (u32, u32, u32, u32) {
        (self.a, self.b, self.c, self.d)
    }
}

fn normalized_matrices(p: u32) -> impl Iterator<Item = MobiusMap> {
    // Leading entry 1 in each position, free entries after it.
    (0..4u32).flat_map(move |lead| {
        let free = 3 - lead;
        let count = (p as u64).pow(free);
        (0..count).filter_map(move |mut k| {
            let mut e = [0u32; 4];
            e[lead as usize] = 1;
            for slot in (lead as usize + 1)..4 {
                e[slot] = (k % p as u64) as u32;
                k /= p as u64;
            }
            let m = MobiusMap { a: e[0], b: e[1], c: e[2], d: e[3], p };
            (m.det() != 0).then_some(m)
        })
    })
}

/// One representative of each inverse pair of order-3 maps (the
/// lexicographically smaller one), in lexicographic order.
pub fn order3_representatives(p: u32) -> Vec<MobiusMap> {
    let mut out: Vec<MobiusMap> = normalized_matrices(p)
        .filter(|m| {
            let t = m.trace();
            !m.is_identity() && m.mul(t, t) == m.det()
        })
        .filter(|m| m.tuple() < m.inverse().tuple())
        .collect();
    out.sort();
    out
}

/// Involutions (trace zero) with quadratic-residue determinant, in
/// lexicographic order.
pub fn residue_involutions(p: u32) -> Vec<MobiusMap> {
    let mut out: Vec<MobiusMap> = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                let d = (p - a) % p;
                let m = MobiusMap { a, b, c, d, p };
                if m.det() == 0 || m.is_identity() {
                    continue;
                }
                let n = m.normalized();
                if n == m && n.has_residue_determinant() {
                    out.push(n);
                }
            }
        }
    }
    // Leading entry zero: a = d = 0, normalized b = 1.
    for c in 1..p {
        let m = MobiusMap { a: 0, b: 1, c, d: 0, p };
        if m.has_residue_determinant() {
            out.push(m);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Rank of a sorted 4-subset in the combinatorial number system.
pub fn rank4(s: [u32; 4]) -> usize {
    binom(s[0] as usize, 1) + binom(s[1] as usize, 2) + binom(s[2] as usize, 3) + binom(s[3] as usize, 4)
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}
