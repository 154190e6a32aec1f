//! Finite-N exact diagonalization in the symmetric subspace.
//!
//! The Hamiltonian is built entirely from collective operators, so it
//! preserves total permutation symmetry and the atomic sector reduces to the
//! bosonic-counting states |n₁,n₂,n₃⟩ with n₁+n₂+n₃ = N, dimension
//! (N+1)(N+2)/2. Tensoring with two truncated photon Fock spaces gives the
//! working basis. Both parity operators are diagonal here (η̂ₙ = −Âₙⁿ + âₙ†âₙ
//! has the integer eigenvalue mₙ − nₙ), and every coupling term changes
//! mₙ − nₙ by 0 or ±2, so the commutators [H, Π̂ₙ] vanish exactly, truncation
//! included.

use crate::meanfield;
use crate::model::ModelParams;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdError {
    #[error("basis dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("eigensolver did not converge (residual {residual})")]
    NoConvergence { residual: f64 },
    #[error("parity sector {sector:?} is empty")]
    EmptySector { sector: (u8, u8) },
    #[error("need at least one particle")]
    NoParticles,
}

/// Problem definition for one exact-diagonalization run.
#[derive(Debug, Clone)]
pub struct EDConfig {
    pub n_particles: usize,
    pub cutoff1: usize,
    pub cutoff2: usize,
    pub params: ModelParams,
    /// Restrict to one parity block (η₁ mod 2, η₂ mod 2); `None` = full space.
    pub parity_sector: Option<(u8, u8)>,
    /// Hard bound on the basis dimension.
    pub max_dim: usize,
}

pub const DEFAULT_DIM_CAP: usize = 200_000;

impl EDConfig {
    pub fn new(n_particles: usize, cutoff1: usize, cutoff2: usize, params: ModelParams) -> Self {
        Self {
            n_particles,
            cutoff1,
            cutoff2,
            params,
            parity_sector: None,
            max_dim: DEFAULT_DIM_CAP,
        }
    }

    /// Photon cutoffs from the mean-field guide max(8, ⌈6·N·φₙ²⌉): the
    /// superradiant photon number scales as N·φ², so the truncation must
    /// track it.
    pub fn with_default_cutoffs(n_particles: usize, params: ModelParams) -> Self {
        let w = meanfield::classify(&params, 1e-9).winner;
        let cutoff = |phi: f64| -> usize {
            // Epsilon guard so that an exactly-integer guide does not round up.
            let guided = (6.0 * n_particles as f64 * phi * phi - 1e-9).ceil().max(0.0) as usize;
            guided.max(8)
        };
        Self::new(
            n_particles,
            cutoff(w.point.phi1),
            cutoff(w.point.phi2),
            params,
        )
    }
}

/// One basis state |n₁,n₂,n₃⟩ ⊗ |m₁⟩ ⊗ |m₂⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisState {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub m1: u32,
    pub m2: u32,
}

impl BasisState {
    /// Parity eigenvalues (±1) of (Π̂₁, Π̂₂) on this state.
    pub fn parities(&self) -> (i8, i8) {
        let sign = |m: u32, n: u32| if (m + n).is_multiple_of(2) { 1 } else { -1 };
        (sign(self.m1, self.n1), sign(self.m2, self.n2))
    }
}

/// Deterministically ordered basis with both index maps.
#[derive(Debug, Clone)]
pub struct Basis {
    pub n_particles: usize,
    pub cutoff1: usize,
    pub cutoff2: usize,
    /// Kept full-product indices (identity when no sector filter).
    keep: Option<Keep>,
    dim: usize,
}

#[derive(Debug, Clone)]
struct Keep {
    forward: Vec<usize>,
    back: Vec<i64>,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn atoms_dim(n: usize) -> usize {
        (n + 1) * (n + 2) / 2
    }

    /// Lexicographic position of the atomic configuration (n₁, n₂).
    fn atom_index(&self, n1: u32, n2: u32) -> usize {
        let n = self.n_particles;
        let n1 = n1 as usize;
        n1 * (n + 1) - (n1 * n1 - n1) / 2 + n2 as usize
    }

    fn full_index(&self, n1: u32, n2: u32, m1: u32, m2: u32) -> usize {
        (self.atom_index(n1, n2) * (self.cutoff1 + 1) + m1 as usize) * (self.cutoff2 + 1)
            + m2 as usize
    }

    fn full_state(&self, full: usize) -> BasisState {
        let c2 = self.cutoff2 + 1;
        let c1 = self.cutoff1 + 1;
        let m2 = (full % c2) as u32;
        let rest = full / c2;
        let m1 = (rest % c1) as u32;
        let mut atom = rest / c1;
        // Invert the triangular layout.
        let n = self.n_particles;
        let mut n1 = 0usize;
        loop {
            let row = n - n1 + 1;
            if atom < row {
                break;
            }
            atom -= row;
            n1 += 1;
        }
        let n2 = atom;
        BasisState {
            n1: n1 as u32,
            n2: n2 as u32,
            n3: (n - n1 - n2) as u32,
            m1,
            m2,
        }
    }

    pub fn state(&self, idx: usize) -> BasisState {
        match &self.keep {
            None => self.full_state(idx),
            Some(k) => self.full_state(k.forward[idx]),
        }
    }

    pub fn index(&self, s: &BasisState) -> Option<usize> {
        if s.n1 + s.n2 + s.n3 != self.n_particles as u32
            || s.m1 as usize > self.cutoff1
            || s.m2 as usize > self.cutoff2
        {
            return None;
        }
        let full = self.full_index(s.n1, s.n2, s.m1, s.m2);
        match &self.keep {
            None => Some(full),
            Some(k) => {
                let b = k.back[full];
                (b >= 0).then_some(b as usize)
            }
        }
    }
}

/// Enumerates the (possibly sector-restricted) basis.
pub fn enumerate_basis(config: &EDConfig) -> Result<Basis, EdError> {
    if config.n_particles == 0 {
        return Err(EdError::NoParticles);
    }
    let full_dim =
        Basis::atoms_dim(config.n_particles) * (config.cutoff1 + 1) * (config.cutoff2 + 1);
    if full_dim > config.max_dim {
        return Err(EdError::DimensionCap {
            dim: full_dim,
            cap: config.max_dim,
        });
    }
    let mut basis = Basis {
        n_particles: config.n_particles,
        cutoff1: config.cutoff1,
        cutoff2: config.cutoff2,
        keep: None,
        dim: full_dim,
    };
    if let Some(sector) = config.parity_sector {
        let mut forward = Vec::new();
        let mut back = vec![-1i64; full_dim];
        for (full, slot) in back.iter_mut().enumerate() {
            let s = basis.full_state(full);
            let (p1, p2) = s.parities();
            let tag = (u8::from(p1 < 0), u8::from(p2 < 0));
            if tag == sector {
                *slot = forward.len() as i64;
                forward.push(full);
            }
        }
        if forward.is_empty() {
            return Err(EdError::EmptySector { sector });
        }
        basis.dim = forward.len();
        basis.keep = Some(Keep { forward, back });
    }
    Ok(basis)
}

/// Real symmetric sparse matrix in CSR form.
#[derive(Debug, Clone)]
pub struct SparseSym {
    pub dim: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseSym {
    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * v[self.indices[k] as usize];
            }
            *o = acc;
        }
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                self.indptr[i]..self.indptr[i + 1]
            })
            .map(|r| r.map(|k| self.values[k].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for k in self.indptr[i]..self.indptr[i + 1] {
                m[(i, self.indices[k] as usize)] = self.values[k];
            }
        }
        m
    }
}

/// Assembles the sparse Hamiltonian over the basis. Matrix elements of both
/// triangles come from the same integer products under a square root, so the
/// matrix is exactly symmetric entry-by-entry.
pub fn build_hamiltonian(config: &EDConfig, basis: &Basis) -> SparseSym {
    let p = &config.params;
    let kappa1 = p.g1 / (config.n_particles as f64).sqrt();
    let kappa2 = p.g2 / (config.n_particles as f64).sqrt();
    let e2 = p.e1 + p.delta;
    let e3 = p.e1 + p.cap_delta;

    let dim = basis.dim();
    let mut indptr = Vec::with_capacity(dim + 1);
    let mut indices: Vec<u32> = Vec::with_capacity(dim * 9);
    let mut values: Vec<f64> = Vec::with_capacity(dim * 9);
    indptr.push(0);

    let amp = |a: u32, b: u32, m: u32| ((a as u64 * b as u64 * m as u64) as f64).sqrt();
    let mut row: Vec<(u32, f64)> = Vec::with_capacity(9);

    for i in 0..dim {
        let s = basis.state(i);
        row.clear();
        let diag = p.e1 * s.n1 as f64
            + e2 * s.n2 as f64
            + e3 * s.n3 as f64
            + p.omega1 * s.m1 as f64
            + p.omega2 * s.m2 as f64;
        row.push((i as u32, diag));

        // Branch couplings: (a†+a)(A_lo^3 + A_3^lo) moves one particle
        // between the branch's low level and level 3 while adding or
        // removing one photon.
        let mut push = |target: BasisState, value: f64| {
            if value != 0.0 {
                if let Some(j) = basis.index(&target) {
                    row.push((j as u32, value));
                }
            }
        };

        // Blue branch (level 1 <-> 3, photon 1).
        for dm in [1i64, -1] {
            let m1 = s.m1 as i64 + dm;
            if m1 < 0 {
                continue;
            }
            let photon = if dm > 0 { s.m1 + 1 } else { s.m1 };
            // A_3^1: 1 -> 3.
            if s.n1 > 0 {
                push(
                    BasisState {
                        n1: s.n1 - 1,
                        n3: s.n3 + 1,
                        m1: m1 as u32,
                        ..s
                    },
                    kappa1 * amp(s.n1, s.n3 + 1, photon),
                );
            }
            // A_1^3: 3 -> 1.
            if s.n3 > 0 {
                push(
                    BasisState {
                        n1: s.n1 + 1,
                        n3: s.n3 - 1,
                        m1: m1 as u32,
                        ..s
                    },
                    kappa1 * amp(s.n3, s.n1 + 1, photon),
                );
            }
        }
        // Red branch (level 2 <-> 3, photon 2).
        for dm in [1i64, -1] {
            let m2 = s.m2 as i64 + dm;
            if m2 < 0 {
                continue;
            }
            let photon = if dm > 0 { s.m2 + 1 } else { s.m2 };
            if s.n2 > 0 {
                push(
                    BasisState {
                        n2: s.n2 - 1,
                        n3: s.n3 + 1,
                        m2: m2 as u32,
                        ..s
                    },
                    kappa2 * amp(s.n2, s.n3 + 1, photon),
                );
            }
            if s.n3 > 0 {
                push(
                    BasisState {
                        n2: s.n2 + 1,
                        n3: s.n3 - 1,
                        m2: m2 as u32,
                        ..s
                    },
                    kappa2 * amp(s.n3, s.n2 + 1, photon),
                );
            }
        }

        row.sort_by_key(|&(j, _)| j);
        for &(j, v) in &row {
            indices.push(j);
            values.push(v);
        }
        indptr.push(indices.len());
    }

    SparseSym {
        dim,
        indptr,
        indices,
        values,
    }
}

// ---------------------------------------------------------------------------
// Eigensolver
// ---------------------------------------------------------------------------

/// Lanczos with full reorthogonalization; returns the `k` lowest eigenpairs.
/// Deterministic start vector. Dense solve is used for tiny problems and as
/// a fallback when the iteration stalls below dimension 2000.
pub fn lowest_eigenpairs(
    h: &SparseSym,
    k: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), EdError> {
    let dim = h.dim;
    let k = k.min(dim);
    if dim <= 64 {
        return Ok(dense_lowest(h, k));
    }
    let scale = h.norm_inf().max(1.0);
    let tol = 1e-10 * scale;
    match lanczos_lowest(h, k, dim.min(420), tol) {
        Ok(pairs) => Ok(pairs),
        Err(err) => {
            if dim <= 2000 {
                Ok(dense_lowest(h, k))
            } else {
                Err(err)
            }
        }
    }
}

fn dense_lowest(h: &SparseSym, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = h.to_dense().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vals = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        vals.push(eig.eigenvalues[idx]);
        vecs.push(eig.eigenvectors.column(idx).iter().copied().collect());
    }
    (vals, vecs)
}

fn lanczos_lowest(
    h: &SparseSym,
    k: usize,
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), EdError> {
    let dim = h.dim;
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(max_iter + 1);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_iter);
    let mut beta: Vec<f64> = Vec::with_capacity(max_iter);

    // Deterministic start vector.
    let mut v0: Vec<f64> = (0..dim)
        .map(|i| ((i as f64 + 1.0) * 0.618033988749895).fract() - 0.5)
        .collect();
    normalize(&mut v0);
    q.push(v0);

    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;
    for j in 0..max_iter {
        h.matvec(&q[j], &mut w);
        let a = dot(&q[j], &w);
        alpha.push(a);
        axpy(&mut w, -a, &q[j]);
        if j > 0 {
            let b_prev = beta[j - 1];
            axpy(&mut w, -b_prev, &q[j - 1]);
        }
        // Full reorthogonalization.
        for qi in &q {
            let overlap = dot(qi, &w);
            axpy(&mut w, -overlap, qi);
        }
        let b = norm(&w);

        let at_end = j + 1 == max_iter || b < 1e-13 * tol.max(1.0);
        if (j + 1) % 8 == 0 || at_end {
            if let Some((vals, svecs, m)) = ritz(&alpha, &beta, k) {
                // Ritz residual bound |beta_m * s_last| per pair.
                let mut worst: f64 = 0.0;
                for col in 0..k.min(vals.len()) {
                    worst = worst.max((b * svecs[(m - 1, col)]).abs());
                }
                last_residual = worst;
                if worst < tol || b < 1e-300 {
                    return Ok(recover(&q, &vals, &svecs, k, dim));
                }
            }
        }
        if b < 1e-300 {
            // Invariant subspace: whatever converged is exact.
            let (vals, svecs, _) = ritz(&alpha, &beta, k).expect("nonempty Krylov space");
            return Ok(recover(&q, &vals, &svecs, k, dim));
        }
        beta.push(b);
        let mut next = std::mem::replace(&mut w, vec![0.0; dim]);
        scale_vec(&mut next, 1.0 / b);
        q.push(next);
    }
    Err(EdError::NoConvergence {
        residual: last_residual,
    })
}

/// Eigen-decomposition of the tridiagonal Lanczos matrix; returns the k
/// lowest values with their tridiagonal eigenvectors.
fn ritz(alpha: &[f64], beta: &[f64], k: usize) -> Option<(Vec<f64>, DMatrix<f64>, usize)> {
    let m = alpha.len();
    if m == 0 {
        return None;
    }
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i > 0 {
            t[(i, i - 1)] = beta[i - 1];
            t[(i - 1, i)] = beta[i - 1];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let k = k.min(m);
    let vals: Vec<f64> = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
    let mut svecs = DMatrix::zeros(m, k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        svecs.set_column(col, &eig.eigenvectors.column(idx));
    }
    Some((vals, svecs, m))
}

fn recover(
    q: &[Vec<f64>],
    vals: &[f64],
    svecs: &DMatrix<f64>,
    k: usize,
    dim: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = svecs.nrows();
    let k = k.min(vals.len());
    let mut vecs = Vec::with_capacity(k);
    for col in 0..k {
        let mut v = vec![0.0; dim];
        for (j, qj) in q.iter().enumerate().take(m) {
            let c = svecs[(j, col)];
            axpy(&mut v, c, qj);
        }
        normalize(&mut v);
        vecs.push(v);
    }
    (vals[..k].to_vec(), vecs)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn scale_vec(v: &mut [f64], s: f64) {
    for x in v.iter_mut() {
        *x *= s;
    }
}

fn normalize(v: &mut [f64]) {
    let n = norm(v);
    if n > 0.0 {
        scale_vec(v, 1.0 / n);
    }
}

// ---------------------------------------------------------------------------
// Ground-state observables
// ---------------------------------------------------------------------------

/// Ground-state data of one finite-N run.
#[derive(Debug, Clone, PartialEq)]
pub struct EDResult {
    pub ground_energy: f64,
    pub energy_per_particle: f64,
    /// (⟨A₁¹⟩, ⟨A₂²⟩, ⟨A₃³⟩)/N.
    pub occupations: [f64; 3],
    /// (⟨a₁†a₁⟩, ⟨a₂†a₂⟩)/N.
    pub photon_densities: [f64; 2],
    /// (⟨Π₁⟩, ⟨Π₂⟩).
    pub parities: [f64; 2],
    /// ⟨A₁²⟩/N.
    pub coherence12: f64,
    /// Splitting to the next eigenvalue (parity-doublet diagnostic).
    pub gap: f64,
    pub cutoff_converged: bool,
}

/// Parity expectations (⟨Π₁⟩, ⟨Π₂⟩) of a normalized state vector.
pub fn parity_expectations(basis: &Basis, v: &[f64]) -> (f64, f64) {
    let mut p1 = 0.0;
    let mut p2 = 0.0;
    for (i, &c) in v.iter().enumerate() {
        let w = c * c;
        let (s1, s2) = basis.state(i).parities();
        p1 += w * s1 as f64;
        p2 += w * s2 as f64;
    }
    (p1, p2)
}

fn observables(basis: &Basis, v: &[f64], e0: f64, e1: f64, converged: bool) -> EDResult {
    let n = basis.n_particles as f64;
    let mut occ = [0.0; 3];
    let mut photons = [0.0; 2];
    let mut coherence = 0.0;
    for (i, &c) in v.iter().enumerate() {
        let w = c * c;
        let s = basis.state(i);
        occ[0] += w * s.n1 as f64;
        occ[1] += w * s.n2 as f64;
        occ[2] += w * s.n3 as f64;
        photons[0] += w * s.m1 as f64;
        photons[1] += w * s.m2 as f64;
        // A_1^2 moves one particle 2 -> 1.
        if s.n2 > 0 {
            let target = BasisState {
                n1: s.n1 + 1,
                n2: s.n2 - 1,
                ..s
            };
            if let Some(j) = basis.index(&target) {
                let amp = ((s.n2 as u64 * (s.n1 as u64 + 1)) as f64).sqrt();
                coherence += v[j] * amp * c;
            }
        }
    }
    let (p1, p2) = parity_expectations(basis, v);
    EDResult {
        ground_energy: e0,
        energy_per_particle: e0 / n,
        occupations: [occ[0] / n, occ[1] / n, occ[2] / n],
        photon_densities: [photons[0] / n, photons[1] / n],
        parities: [p1, p2],
        coherence12: coherence / n,
        gap: e1 - e0,
        cutoff_converged: converged,
    }
}

type SolveOutput = (Basis, Vec<f64>, Vec<Vec<f64>>);

fn solve(config: &EDConfig, k: usize) -> Result<SolveOutput, EdError> {
    let basis = enumerate_basis(config)?;
    let h = build_hamiltonian(config, &basis);
    let (vals, vecs) = lowest_eigenpairs(&h, k)?;
    Ok((basis, vals, vecs))
}

/// Lowest eigenpair with all observables; `verify_cutoffs` reruns with both
/// photon cutoffs doubled and demands a relative ground-energy change below
/// 1e−8 (reported, not enforced). Doubled runs that would exceed the
/// dimension cap leave `cutoff_converged = false`.
pub fn ground_state_with(config: &EDConfig, verify_cutoffs: bool) -> Result<EDResult, EdError> {
    let (basis, vals, vecs) = solve(config, 2)?;
    let e0 = vals[0];
    let e1 = vals.get(1).copied().unwrap_or(e0);
    let mut converged = false;
    if verify_cutoffs {
        let doubled = EDConfig {
            cutoff1: config.cutoff1 * 2,
            cutoff2: config.cutoff2 * 2,
            ..config.clone()
        };
        if let Ok((_, dvals, _)) = solve(&doubled, 1) {
            converged = (dvals[0] - e0).abs() <= 1e-8 * (1.0 + e0.abs());
        }
    }
    Ok(observables(&basis, &vecs[0], e0, e1, converged))
}

/// [`ground_state_with`] including the doubled-cutoff convergence check.
pub fn ground_state(config: &EDConfig) -> Result<EDResult, EdError> {
    ground_state_with(config, true)
}
