//! The symmetric master matrix, node data, shares and secret recovery.
//!
//! Columns of `M` split into three blocks: `A = [0, k-ell)` houses `S_A`,
//! `R = [k-ell, k)` the pure randomness and `C = [k, d)` the `S_B` columns
//! whose bottom block is zero. Standard Shamir-like operation is
//! `ell = k - 1`, where `S_A` is a scalar.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    decode_with_errors, dot, encoding_vector, powers, solve_vandermonde, FieldElement, FieldSpec,
};
use crate::random::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharingParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Collusion threshold.
    pub ell: usize,
    /// Number of active adversaries tolerated.
    pub t_adv: usize,
    pub spec: FieldSpec,
    /// Replace the scalar `S_A` by a random value so every share coordinate
    /// has degree below `k`.
    pub degree_cap: bool,
}

impl SharingParams {
    /// Standard parameters: `ell = k - 1`, no adversaries.
    pub fn new(n: usize, k: usize, d: usize, spec: FieldSpec) -> Result<Self> {
        let p = Self {
            n,
            k,
            d,
            ell: k.saturating_sub(1),
            t_adv: 0,
            spec,
            degree_cap: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_ell(mut self, ell: usize) -> Result<Self> {
        self.ell = ell;
        self.validate()?;
        Ok(self)
    }

    pub fn with_adversaries(mut self, t: usize) -> Result<Self> {
        self.t_adv = t;
        self.validate()?;
        Ok(self)
    }

    pub fn with_degree_cap(mut self, on: bool) -> Result<Self> {
        self.degree_cap = on;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.k == 0 || self.n < self.k {
            return bad(format!("need n >= k >= 1, got n={} k={}", self.n, self.k));
        }
        if self.ell >= self.k {
            return bad(format!("need ell < k, got ell={} k={}", self.ell, self.k));
        }
        if self.d < self.k {
            return bad(format!("need d >= k, got d={} k={}", self.d, self.k));
        }
        if self.spec.modulus() <= self.n as u64 {
            return bad(format!("need q > n, got q={} n={}", self.spec.modulus(), self.n));
        }
        if self.degree_cap && (!self.is_standard() || self.d == self.k) {
            return bad("degree cap needs ell = k-1 and d > k".into());
        }
        Ok(())
    }

    pub fn is_standard(&self) -> bool {
        self.ell + 1 == self.k
    }

    fn a(&self) -> usize {
        self.k - self.ell
    }

    /// Number of secret symbols housed in `M`.
    pub fn secret_len(&self) -> usize {
        let a = self.a();
        let full = a * (a + 1) / 2 + a * (self.d - self.k);
        if self.degree_cap {
            full - 1
        } else {
            full
        }
    }

    /// 0-based positions of node data that form the share.
    pub fn share_positions(&self) -> Vec<usize> {
        let c = self.k..self.d;
        if self.degree_cap {
            c.collect()
        } else {
            (0..self.a()).chain(c).collect()
        }
    }

    pub fn share_len(&self) -> usize {
        self.share_positions().len()
    }

    /// Random draws needed to build `M`.
    pub fn randomness_count(&self) -> usize {
        let (a, l) = (self.a(), self.ell);
        l * a + l * (l + 1) / 2 + (self.d - self.k) * l + usize::from(self.degree_cap)
    }

    /// Values a non-dealer-neighbour must collect before decoding.
    pub fn quota(&self) -> usize {
        self.d + 2 * self.t_adv
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SecretVector {
    /// `S_B` row-major, then the upper triangle of `S_A` row-major.
    pub entries: Vec<FieldElement>,
}

impl SecretVector {
    pub fn new(entries: Vec<FieldElement>) -> Self {
        Self { entries }
    }

    pub fn from_values(values: &[u64], spec: FieldSpec) -> Self {
        Self::new(values.iter().map(|&v| spec.elem(v)).collect())
    }

    pub fn random(params: &SharingParams, rng: &mut impl RandomSource) -> Self {
        Self::new((0..params.secret_len()).map(|_| rng.draw(params.spec)).collect())
    }

    pub fn values(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.value()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterMatrix {
    pub entries: Vec<Vec<FieldElement>>,
    pub randomness_count: usize,
}

impl MasterMatrix {
    /// Wraps arbitrary entries without checking symmetry, e.g. to model a
    /// cheating dealer.
    pub fn from_entries(entries: Vec<Vec<FieldElement>>) -> Self {
        Self {
            entries,
            randomness_count: 0,
        }
    }

    pub fn d(&self) -> usize {
        self.entries.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.d();
        (0..d).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }
}

/// Builds `M` for standard parameters.
pub fn build_master_matrix(
    secret: &SecretVector,
    params: &SharingParams,
    rng: &mut impl RandomSource,
) -> Result<MasterMatrix> {
    if !params.is_standard() {
        return Err(Error::InvalidParams(
            "standard matrix needs ell = k-1; use build_two_threshold_matrix".into(),
        ));
    }
    build_blocks(secret, params, rng)
}

/// Builds the ramp variant with collusion threshold `ell < k`.
pub fn build_two_threshold_matrix(
    secret: &SecretVector,
    params: &SharingParams,
    rng: &mut impl RandomSource,
) -> Result<MasterMatrix> {
    params.validate()?;
    build_blocks(secret, params, rng)
}

fn build_blocks(
    secret: &SecretVector,
    params: &SharingParams,
    rng: &mut impl RandomSource,
) -> Result<MasterMatrix> {
    params.validate()?;
    if secret.entries.len() != params.secret_len() {
        return Err(Error::ArityMismatch {
            expected: params.secret_len(),
            got: secret.entries.len(),
        });
    }
    let spec = params.spec;
    let (d, k, a) = (params.d, params.k, params.a());
    let mut m = vec![vec![spec.zero(); d]; d];
    let mut set = |i: usize, j: usize, v: FieldElement| {
        m[i][j] = v;
        m[j][i] = v;
    };
    let mut s = secret.entries.iter().copied();
    for c in k..d {
        for col in 0..a {
            set(c, col, s.next().unwrap());
        }
    }
    let mut draws = 0;
    let mut rand = || {
        draws += 1;
        rng.draw(spec)
    };
    // R_a: rows R, columns A.
    for r in a..k {
        for col in 0..a {
            set(r, col, rand());
        }
    }
    // R_b: upper triangle of the R block.
    for r in a..k {
        for c in r..k {
            set(r, c, rand());
        }
    }
    // R_c: rows C, columns R.
    for c in k..d {
        for r in a..k {
            set(c, r, rand());
        }
    }
    if params.degree_cap {
        set(0, 0, rand());
    } else {
        for i in 0..a {
            for j in i..a {
                set(i, j, s.next().unwrap());
            }
        }
    }
    debug_assert_eq!(draws, params.randomness_count());
    Ok(MasterMatrix {
        entries: m,
        randomness_count: draws,
    })
}

/// The vector `psi_i^T M` held by participant `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NodeData {
    pub node_id: u64,
    pub vector: Vec<FieldElement>,
}

/// The secret-bearing part of a participant's node data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Share {
    pub node_id: u64,
    pub values: Vec<FieldElement>,
}

pub fn node_data(m: &MasterMatrix, node_id: u64, spec: FieldSpec) -> Result<NodeData> {
    let d = m.d();
    let psi = encoding_vector(node_id, d, spec)?.entries;
    let vector = (0..d)
        .map(|j| {
            let col: Vec<FieldElement> = (0..d).map(|i| m.entries[i][j]).collect();
            dot(&psi, &col)
        })
        .collect();
    Ok(NodeData { node_id, vector })
}

/// `psi_i^T M psi_dest`, the value participant `i` relays to `dest`.
pub fn relay_value(data: &NodeData, dest_id: u64) -> FieldElement {
    let spec = data.vector[0].spec();
    dot(&data.vector, &powers(spec.elem(dest_id), data.vector.len()))
}

fn split(received: &[(u64, FieldElement)]) -> (Vec<u64>, Vec<FieldElement>) {
    received.iter().copied().unzip()
}

/// Recovers node data from exactly `d` relay values.
pub fn recover_node_data(
    node_id: u64,
    received: &[(u64, FieldElement)],
    params: &SharingParams,
) -> Result<NodeData> {
    if received.len() != params.d {
        return Err(Error::ArityMismatch {
            expected: params.d,
            got: received.len(),
        });
    }
    let (ids, values) = split(received);
    let vector = solve_vandermonde(&ids, &values, params.spec)?;
    Ok(NodeData { node_id, vector })
}

/// Recovers node data from `d + 2t` relay values of which at most `t` lie.
pub fn recover_node_data_with_errors(
    node_id: u64,
    received: &[(u64, FieldElement)],
    params: &SharingParams,
) -> Result<NodeData> {
    let (ids, values) = split(received);
    let vector = decode_with_errors(&ids, &values, params.d, params.t_adv, params.spec)?;
    Ok(NodeData { node_id, vector })
}

pub fn extract_share(data: &NodeData, params: &SharingParams) -> Share {
    Share {
        node_id: data.node_id,
        values: params
            .share_positions()
            .into_iter()
            .map(|p| data.vector[p])
            .collect(),
    }
}

/// Two-stage recovery from exactly `k` shares: the `C` columns are
/// polynomials of degree below `k` and yield `S_B`; subtracting their
/// contribution from the `A` columns leaves another degree-`k` system that
/// yields `S_A`.
pub fn recover_secret(shares: &[Share], params: &SharingParams) -> Result<SecretVector> {
    let (k, d, a) = (params.k, params.d, params.a());
    if shares.len() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            got: shares.len(),
        });
    }
    let spec = params.spec;
    let ids: Vec<u64> = shares.iter().map(|s| s.node_id).collect();
    let positions = params.share_positions();
    let value_at = |s: &Share, pos: usize| -> FieldElement {
        s.values[positions.iter().position(|&p| p == pos).unwrap()]
    };
    for s in shares {
        if s.values.len() != positions.len() {
            return Err(Error::ArityMismatch {
                expected: positions.len(),
                got: s.values.len(),
            });
        }
    }
    // s_b[c - k][col] = M[c][col]
    let mut s_b = Vec::with_capacity(d - k);
    for c in k..d {
        let vals: Vec<FieldElement> = shares.iter().map(|s| value_at(s, c)).collect();
        let coeffs = solve_vandermonde(&ids, &vals, spec)?;
        s_b.push(coeffs[..a].to_vec());
    }
    let mut entries: Vec<FieldElement> = s_b.iter().flatten().copied().collect();
    if params.degree_cap {
        return Ok(SecretVector::new(entries));
    }
    let mut s_a = vec![vec![spec.zero(); a]; a];
    for col in 0..a {
        let vals: Vec<FieldElement> = shares
            .iter()
            .map(|s| {
                let x = spec.elem(s.node_id);
                let tail = powers(x, d);
                let mut v = value_at(s, col);
                for c in k..d {
                    v -= tail[c] * s_b[c - k][col];
                }
                v
            })
            .collect();
        let coeffs = solve_vandermonde(&ids, &vals, spec)?;
        for (row, coeff) in coeffs.iter().take(a).enumerate() {
            s_a[row][col] = *coeff;
        }
    }
    for i in 0..a {
        for j in i..a {
            entries.push(s_a[i][j]);
        }
    }
    Ok(SecretVector::new(entries))
}

/// Values two participants hold for their common entry of `M`: `from_i` is
/// `i`'s claim of `psi_i^T M psi_j`, `from_j` is `j`'s claim of the mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairClaim {
    pub i: u64,
    pub j: u64,
    pub from_i: FieldElement,
    pub from_j: FieldElement,
}

/// Claims for every unordered pair of the given node data.
pub fn pairwise_claims(data: &[NodeData]) -> Vec<PairClaim> {
    let mut out = Vec::new();
    for (x, a) in data.iter().enumerate() {
        for b in &data[x + 1..] {
            out.push(PairClaim {
                i: a.node_id,
                j: b.node_id,
                from_i: relay_value(a, b.node_id),
                from_j: relay_value(b, a.node_id),
            });
        }
    }
    out
}

/// Pairs whose claims disagree.
pub fn audit_consistency(claims: &[PairClaim]) -> Vec<(u64, u64)> {
    claims
        .iter()
        .filter(|c| c.from_i != c.from_j)
        .map(|c| (c.i, c.j))
        .collect()
}
