//! Constructive generation: builds a certificate for any monomial field
//! `m * d_i`, and by linearity for any target vector field, from the
//! generator pair `(U, V)` alone.
//!
//! A [`CertStore`] runs a fixed initialization pipeline and then answers
//! arbitrary requests from a memo keyed by `(monomial, direction)`:
//!
//! 1. For each source index `k = n, n-1, ..., 1`: bracket `V` with `d_k`
//!    exactly `4k - 3` times. Every slot of `V` except one has `z_k`-degree
//!    too low to survive, so the result is a single monomial field (times a
//!    falling-factorial scalar). Further single brackets with `d_j` lower
//!    the remaining exponents one at a time, yielding the whole family
//!    `z_n^{s_n} ... z_k^{s_k} * d_target` with all `s_j <= 3`.
//! 2. For `k < n`, `[z_k^3 dn, zn dk] = z_k^3 dk - 3 z_k^2 zn dn` plus the
//!    already-known correction term gives `z_k^3 dk`, then brackets with
//!    `d_k` walk the exponent down.
//! 3. `[z_i dn, zn dj] = z_i dj` fills in all linear fields.
//! 4. On demand: `[z_i^s di, z_i^2 di] = (2-s) z_i^{s+1} di` raises diagonal
//!    powers past 3, `[z_i^s di, z_i dj] = z_i^s dj` transports them off the
//!    diagonal, and `[z_k^s di, f*z_i di] = (p+1) f*z_k^s di` (where `z_i`
//!    has exponent `p` in `f`) peels general monomials one variable at a
//!    time.
//!
//! Every memo entry evaluates to its key monomial field with coefficient
//! exactly 1; the bookkeeping scalars are materialized as linear-combination
//! normalizations, so certificates verify by exact rational equality.

use crate::algebra::{factorial, Monomial, Rational};
use crate::certificate::{CertDag, CertNode, Certificate, NodeId};
use crate::vectorfield::VectorField;
use num_bigint::BigInt;
use num_traits::One;
use std::collections::HashMap;

/// Certificate factory for one ambient dimension, with a shared interned
/// node table and a `(monomial, direction) -> node` memo.
pub struct CertStore {
    n: usize,
    dag: CertDag,
    memo: HashMap<(Monomial, usize), NodeId>,
    u_id: NodeId,
    v_id: NodeId,
}

impl CertStore {
    /// Builds the store and runs the full initialization pipeline for
    /// dimension `n >= 1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        let mut dag = CertDag::new();
        let u_id = dag.add(CertNode::GenU);
        let v_id = dag.add(CertNode::GenV);
        let mut store = CertStore {
            n,
            dag,
            memo: HashMap::new(),
            u_id,
            v_id,
        };
        // dn is a generator; seed it so families and ladders can use it.
        store.memo.insert((Monomial::constant(n), n), u_id);
        for k in (1..=n).rev() {
            store.direction_family(k);
        }
        for k in 1..n {
            store.cube_diagonal(k);
        }
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    store.linear_field(i, j);
                }
            }
        }
        store
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total interned nodes across everything built so far.
    pub fn node_count(&self) -> usize {
        self.dag.len()
    }

    fn memo_get(&self, m: &Monomial, dir: usize) -> Option<NodeId> {
        self.memo.get(&(m.clone(), dir)).copied()
    }

    /// First insertion wins; later certificates for the same field are
    /// discarded so ids stay stable.
    fn memo_insert(&mut self, m: Monomial, dir: usize, id: NodeId) {
        self.memo.entry((m, dir)).or_insert(id);
    }

    fn require(&self, m: &Monomial, dir: usize) -> NodeId {
        self.memo_get(m, dir)
            .unwrap_or_else(|| panic!("missing prerequisite entry for {m} d{dir}"))
    }

    fn unit_cert(&self, k: usize) -> NodeId {
        self.require(&Monomial::constant(self.n), k)
    }

    /// Normalized memo entry: `(1/scalar) * node`.
    fn normalized(&mut self, m: Monomial, dir: usize, node: NodeId, scalar: BigInt) {
        let norm = Rational::new(BigInt::one(), scalar);
        let id = self.dag.add(CertNode::LinComb(vec![(norm, node)]));
        self.memo_insert(m, dir, id);
    }

    /// Head chain plus exponent reductions for source index `k`, producing
    /// the family for direction `k - 1` (or `n` when `k = 1`).
    fn direction_family(&mut self, k: usize) {
        let n = self.n;
        let target_dir = if k >= 2 { k - 1 } else { n };
        let differ = self.unit_cert(k);
        let mut chain = self.v_id;
        for _ in 0..(4 * k - 3) {
            chain = self.dag.add(CertNode::Bracket(differ, chain));
        }
        // chain now evaluates to ((4k)!/6) * (prod_{j>k} z_j^{4k}) z_k^3 * d_target
        let head_scalar = factorial(4 * k as u64) / BigInt::from(6);
        let mut exps = vec![0u32; n];
        for j in (k + 1)..=n {
            exps[j - 1] = 4 * k as u32;
        }
        exps[k - 1] = 3;
        self.reduce_family(k, n, chain, head_scalar, exps, target_dir);
    }

    /// Walks variable `j` down from its current exponent, recording every
    /// entry with all chosen exponents at most 3. One bracket with `d_j`
    /// lowers the exponent by one and multiplies the value by it.
    fn reduce_family(
        &mut self,
        k: usize,
        j: usize,
        node: NodeId,
        scalar: BigInt,
        exps: Vec<u32>,
        target_dir: usize,
    ) {
        if j < k {
            let m = Monomial::from_exponents(exps);
            self.normalized(m, target_dir, node, scalar);
            return;
        }
        let differ = self.unit_cert(j);
        let full = exps[j - 1];
        let mut cur = node;
        let mut sc = scalar;
        for e in (0..=full).rev() {
            if e <= 3 {
                let mut chosen = exps.clone();
                chosen[j - 1] = e;
                self.reduce_family(k, j - 1, cur, sc.clone(), chosen, target_dir);
            }
            if e > 0 {
                cur = self.dag.add(CertNode::Bracket(differ, cur));
                sc *= BigInt::from(e);
            }
        }
    }

    /// `z_k^3 dk` via `[z_k^3 dn, zn dk] + 3 * (z_k^2 zn dn)`, then the
    /// bracket ladder down to `z_k^0 dk`. Only needed for `k < n`.
    fn cube_diagonal(&mut self, k: usize) {
        let n = self.n;
        let zk3 = Monomial::constant(n).with_exponent(k, 3);
        let zn = Monomial::variable(n, n);
        let corr = zn.with_exponent(k, 2);
        let left = self.require(&zk3, n);
        let right = self.require(&zn, k);
        let corr_id = self.require(&corr, n);
        let br = self.dag.add(CertNode::Bracket(left, right));
        let id = self.dag.add(CertNode::LinComb(vec![
            (Rational::one(), br),
            (Rational::from_integer(BigInt::from(3)), corr_id),
        ]));
        self.memo_insert(zk3, k, id);

        let differ = self.unit_cert(k);
        let mut prev = id;
        for s in (0..=2u32).rev() {
            let br = self.dag.add(CertNode::Bracket(differ, prev));
            let entry = self
                .dag
                .add(CertNode::LinComb(vec![(Rational::new(
                    BigInt::one(),
                    BigInt::from(s + 1),
                ), br)]));
            self.memo_insert(Monomial::constant(n).with_exponent(k, s), k, entry);
            prev = entry;
        }
    }

    /// `z_i dj = [z_i dn, zn dj]` for `i != j`; no-op when already known.
    fn linear_field(&mut self, i: usize, j: usize) {
        assert_ne!(i, j, "diagonal linear fields come from the cube ladder");
        let n = self.n;
        let zi = Monomial::variable(n, i);
        if self.memo_get(&zi, j).is_some() {
            return;
        }
        let zn = Monomial::variable(n, n);
        let left = self.require(&zi, n);
        let right = self.require(&zn, j);
        let id = self.dag.add(CertNode::Bracket(left, right));
        self.memo_insert(zi, j, id);
    }

    /// `z_i^s di`. Grounded at `s <= 3`; above that each step is
    /// `(1/(3-s)) * [z_i^{s-1} di, z_i^2 di]`, with `3 - s` never zero.
    fn diagonal_power(&mut self, i: usize, s: u32) -> NodeId {
        let n = self.n;
        let target = Monomial::constant(n).with_exponent(i, s);
        if let Some(id) = self.memo_get(&target, i) {
            return id;
        }
        debug_assert!(s >= 4, "powers up to 3 are seeded by the pipeline");
        let square = self.require(&Monomial::constant(n).with_exponent(i, 2), i);
        let mut t = s;
        while self
            .memo_get(&Monomial::constant(n).with_exponent(i, t), i)
            .is_none()
        {
            t -= 1;
        }
        let mut cur = self.require(&Monomial::constant(n).with_exponent(i, t), i);
        for next in (t + 1)..=s {
            let br = self.dag.add(CertNode::Bracket(cur, square));
            let norm = Rational::new(BigInt::one(), BigInt::from(3i64 - i64::from(next)));
            cur = self.dag.add(CertNode::LinComb(vec![(norm, br)]));
            self.memo_insert(Monomial::constant(n).with_exponent(i, next), i, cur);
        }
        cur
    }

    /// `z_i^s dj` for `i != j`, via `[z_i^s di, z_i dj]`.
    fn offdiag_power(&mut self, i: usize, j: usize, s: u32) -> NodeId {
        assert_ne!(i, j, "use diagonal_power for i = j");
        let n = self.n;
        let target = Monomial::constant(n).with_exponent(i, s);
        if let Some(id) = self.memo_get(&target, j) {
            return id;
        }
        let left = self.diagonal_power(i, s);
        let right = self.require(&Monomial::variable(n, i), j);
        let id = self.dag.add(CertNode::Bracket(left, right));
        self.memo_insert(target, j, id);
        id
    }

    /// Certificate node for `m * d_dir`, for an arbitrary monomial `m`.
    ///
    /// General monomials peel the largest-index non-pivot variable `z_k`:
    /// with `m = f * z_k^s` and `p` the pivot exponent in `f`,
    /// `m * d_dir = (1/(p+1)) * [z_k^s d_dir, (f * z_dir) d_dir]` and the
    /// right factor recurses on a monomial with one fewer distinct
    /// non-pivot variable.
    pub fn monomial_certificate_id(&mut self, m: &Monomial, dir: usize) -> NodeId {
        assert_eq!(m.dim(), self.n, "monomial dimension mismatch");
        assert!(dir >= 1 && dir <= self.n, "direction index out of range");
        if let Some(id) = self.memo_get(m, dir) {
            return id;
        }
        let peel = (1..=self.n)
            .filter(|&v| v != dir && m.exponent(v) > 0)
            .max();
        let k = match peel {
            None => return self.diagonal_power(dir, m.exponent(dir)),
            Some(k) => k,
        };
        let s = m.exponent(k);
        let rest = m.with_exponent(k, 0);
        if rest.is_constant() {
            return self.offdiag_power(k, dir, s);
        }
        let p = m.exponent(dir);
        let left = self.offdiag_power(k, dir, s);
        let right_m = rest.with_exponent(dir, p + 1);
        let right = self.monomial_certificate_id(&right_m, dir);
        let br = self.dag.add(CertNode::Bracket(left, right));
        let norm = Rational::new(BigInt::one(), BigInt::from(u64::from(p) + 1));
        let id = self.dag.add(CertNode::LinComb(vec![(norm, br)]));
        self.memo_insert(m.clone(), dir, id);
        id
    }

    /// Standalone certificate for `m * d_dir`.
    pub fn monomial_certificate(&mut self, m: &Monomial, dir: usize) -> Certificate {
        let id = self.monomial_certificate_id(m, dir);
        self.dag.extract(self.n, id)
    }

    /// Certificate for an arbitrary target field: a linear combination of
    /// monomial certificates with the target's coefficients. The zero field
    /// gets the canonical zero certificate `1 * [U, U]`.
    pub fn field_certificate(&mut self, target: &VectorField) -> Certificate {
        assert_eq!(target.dim(), self.n, "field dimension mismatch");
        let root = if target.is_zero() {
            let br = self.dag.add(CertNode::Bracket(self.u_id, self.u_id));
            self.dag.add(CertNode::LinComb(vec![(Rational::one(), br)]))
        } else {
            let mut parts = Vec::new();
            for dir in 1..=self.n {
                let terms: Vec<(Monomial, Rational)> = target
                    .coeff(dir)
                    .terms()
                    .map(|(m, c)| (m.clone(), c.clone()))
                    .collect();
                for (m, c) in terms {
                    let id = self.monomial_certificate_id(&m, dir);
                    parts.push((c, id));
                }
            }
            self.dag.add(CertNode::LinComb(parts))
        };
        self.dag.extract(self.n, root)
    }
}
