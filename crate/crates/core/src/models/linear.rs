//! Jacobian contractions of the vector field `F = G − u` at a real state with
//! β = 0, written out analytically per architecture.
//!
//! Notation: `D_l = diag σ'(u_l)`, `S_l = diag σ''(u_l)`, `v_l = σ(u_l)`.

use super::{sigma_prime_vec, sigma_vec, Bound, ModelKind, ModelParams};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::activation::sigma_second_vec;

/// Largest state size for which a dense Jacobian is assembled.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// Per-layer quantities shared by the contractions.
struct Local {
    d: Vec<Vec<f64>>,
    s: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

impl Bound<'_> {
    fn local(&self, u: &[f64]) -> Local {
        let ul = self.split(u);
        Local {
            d: ul.iter().map(|x| sigma_prime_vec(x)).collect(),
            s: ul.iter().map(|x| sigma_second_vec(x)).collect(),
            v: ul.iter().map(|x| sigma_vec(x)).collect(),
        }
    }

    fn concat(&self, parts: Vec<Vec<f64>>) -> Vec<f64> {
        parts.into_iter().flatten().collect()
    }

    fn zero_layers(&self) -> Vec<Vec<f64>> {
        self.net.dims.layers.iter().map(|&n| vec![0.0; n]).collect()
    }

    /// Hopfield pre-activation `h_l = drive/b_l + W_{l−1} v_{l−1} + W_lᵀ v_{l+1}`.
    fn hopfield_field(&self, v: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let p = self.params();
        let nl = self.num_layers();
        (0..nl)
            .map(|l| {
                let mut h = if l == 0 { self.drive.clone() } else { p.b[l].clone() };
                if l > 0 {
                    p.w_fwd[l - 1].matvec_add(&v[l - 1], &mut h);
                }
                if l + 1 < nl {
                    p.w_fwd[l].matvec_t_add(&v[l + 1], &mut h);
                }
                h
            })
            .collect()
    }

    /// `r_l = W_b,l ε_{l+1}` for the predictive-coding network.
    fn pcn_feedback(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let p = self.params();
        let eps = self.pcn_errors(u);
        (0..self.num_layers() - 1)
            .map(|l| p.w_bwd[l].matvec(&eps[l + 1]))
            .collect()
    }

    /// `e_l(b) = b_l − W_f,l−1 D_{l−1} b_{l−1}`.
    fn pcn_error_tangent(&self, loc: &Local, b: &[&[f64]]) -> Vec<Vec<f64>> {
        let p = self.params();
        (0..self.num_layers())
            .map(|l| {
                let mut e = b[l].to_vec();
                if l > 0 {
                    let t = p.w_fwd[l - 1].matvec(&hadamard(&loc.d[l - 1], b[l - 1]));
                    for (ei, ti) in e.iter_mut().zip(t) {
                        *ei -= ti;
                    }
                }
                e
            })
            .collect()
    }

    /// `q_l = −a_l + W_b,l−1ᵀ (D_{l−1} a_{l−1})`.
    fn pcn_adjoint_error(&self, d: &[Vec<f64>], a: &[&[f64]]) -> Vec<Vec<f64>> {
        let p = self.params();
        (0..self.num_layers())
            .map(|l| {
                let mut q: Vec<f64> = a[l].iter().map(|x| -x).collect();
                if l > 0 {
                    p.w_bwd[l - 1].matvec_t_add(&hadamard(&d[l - 1], a[l - 1]), &mut q);
                }
                q
            })
            .collect()
    }

    /// `J_G b` at the real state `u`.
    pub fn jvp_update(&self, u: &[f64], b: &[f64]) -> Vec<f64> {
        let p = self.params();
        let nl = self.num_layers();
        let loc = self.local(u);
        let bl = self.split(b);
        let db: Vec<Vec<f64>> = (0..nl).map(|l| hadamard(&loc.d[l], bl[l])).collect();
        let mut out = self.zero_layers();
        match self.kind() {
            ModelKind::ReciprocalMLP | ModelKind::DirectFeedback => {
                for l in 0..nl {
                    if l > 0 {
                        p.w_fwd[l - 1].matvec_add(&db[l - 1], &mut out[l]);
                    }
                    if self.kind() == ModelKind::ReciprocalMLP && l + 1 < nl {
                        p.w_bwd[l].matvec_add(&db[l + 1], &mut out[l]);
                    }
                }
                if let Some(fb) = &p.w_fb {
                    fb.matvec_add(&db[nl - 1], &mut out[0]);
                }
            }
            ModelKind::HopfieldMLP => {
                let h = self.hopfield_field(&loc.v);
                for l in 0..nl {
                    let mut t = vec![0.0; bl[l].len()];
                    if l > 0 {
                        p.w_fwd[l - 1].matvec_add(&db[l - 1], &mut t);
                    }
                    if l + 1 < nl {
                        p.w_fwd[l].matvec_t_add(&db[l + 1], &mut t);
                    }
                    for i in 0..t.len() {
                        out[l][i] = loc.s[l][i] * h[l][i] * bl[l][i] + loc.d[l][i] * t[i];
                    }
                }
            }
            ModelKind::PCN => {
                let eta = self.net.pcn_step;
                let r = self.pcn_feedback(u);
                let e = self.pcn_error_tangent(&loc, &bl);
                for l in 0..nl {
                    let mut df: Vec<f64> = e[l].iter().map(|x| -x).collect();
                    if l + 1 < nl {
                        let t = p.w_bwd[l].matvec(&e[l + 1]);
                        for i in 0..df.len() {
                            df[i] += loc.s[l][i] * r[l][i] * bl[l][i] + loc.d[l][i] * t[i];
                        }
                    }
                    out[l] = bl[l].iter().zip(df).map(|(bi, fi)| bi + eta * fi).collect();
                }
            }
        }
        self.concat(out)
    }

    /// `J_Gᵀ a` at the real state `u`.
    pub fn vjp_update(&self, u: &[f64], a: &[f64]) -> Vec<f64> {
        let p = self.params();
        let nl = self.num_layers();
        let loc = self.local(u);
        let al = self.split(a);
        let mut out = self.zero_layers();
        match self.kind() {
            ModelKind::ReciprocalMLP | ModelKind::DirectFeedback => {
                for m in 0..nl {
                    let mut t = vec![0.0; al[m].len()];
                    if m + 1 < nl {
                        p.w_fwd[m].matvec_t_add(al[m + 1], &mut t);
                    }
                    if self.kind() == ModelKind::ReciprocalMLP && m > 0 {
                        p.w_bwd[m - 1].matvec_t_add(al[m - 1], &mut t);
                    }
                    if m == nl - 1 {
                        if let Some(fb) = &p.w_fb {
                            fb.matvec_t_add(al[0], &mut t);
                        }
                    }
                    out[m] = hadamard(&loc.d[m], &t);
                }
            }
            ModelKind::HopfieldMLP => return self.jvp_update(u, a),
            ModelKind::PCN => {
                let eta = self.net.pcn_step;
                let r = self.pcn_feedback(u);
                let q = self.pcn_adjoint_error(&loc.d, &al);
                for m in 0..nl {
                    let mut g = q[m].clone();
                    if m + 1 < nl {
                        let t = p.w_fwd[m].matvec_t(&q[m + 1]);
                        for i in 0..g.len() {
                            g[i] += -loc.d[m][i] * t[i] + al[m][i] * loc.s[m][i] * r[m][i];
                        }
                    }
                    out[m] = al[m].iter().zip(g).map(|(ai, gi)| ai + eta * gi).collect();
                }
            }
        }
        self.concat(out)
    }

    /// `J_F b = J_G b − b`.
    pub fn jvp(&self, u: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = self.jvp_update(u, b);
        for (o, bi) in out.iter_mut().zip(b) {
            *o -= bi;
        }
        out
    }

    /// `J_Fᵀ a`.
    pub fn vjp(&self, u: &[f64], a: &[f64]) -> Vec<f64> {
        let mut out = self.vjp_update(u, a);
        for (o, ai) in out.iter_mut().zip(a) {
            *o -= ai;
        }
        out
    }

    /// Dense `J_F`, assembled block by block.
    pub fn jacobian_dense(&self, u: &[f64]) -> Result<Matrix> {
        self.jacobian_dense_limited(u, DEFAULT_DENSE_LIMIT)
    }

    pub fn jacobian_dense_limited(&self, u: &[f64], limit: usize) -> Result<Matrix> {
        let n = u.len();
        if n != self.net.state_dim() {
            return Err(Error::Shape(format!(
                "state of length {n}, expected {}",
                self.net.state_dim()
            )));
        }
        if n > limit {
            return Err(Error::TooLarge { size: n, limit });
        }
        let p = self.params();
        let nl = self.num_layers();
        let off = self.offsets().to_vec();
        let loc = self.local(u);
        let mut j = Matrix::zeros(n, n);
        // Adds `scale · rowdiag · M · coldiag` into block (bi, bj).
        let mut put = |bi: usize,
                       bj: usize,
                       m: &dyn Fn(usize, usize) -> f64,
                       rows: usize,
                       cols: usize| {
            for r in 0..rows {
                for c in 0..cols {
                    j.add_at(off[bi] + r, off[bj] + c, m(r, c));
                }
            }
        };
        match self.kind() {
            ModelKind::ReciprocalMLP | ModelKind::DirectFeedback => {
                for l in 1..nl {
                    let w = &p.w_fwd[l - 1];
                    let d = &loc.d[l - 1];
                    put(l, l - 1, &|r, c| w.get(r, c) * d[c], w.rows(), w.cols());
                }
                for l in 0..p.w_bwd.len() {
                    let w = &p.w_bwd[l];
                    let d = &loc.d[l + 1];
                    put(l, l + 1, &|r, c| w.get(r, c) * d[c], w.rows(), w.cols());
                }
                if let Some(w) = &p.w_fb {
                    let d = &loc.d[nl - 1];
                    put(0, nl - 1, &|r, c| w.get(r, c) * d[c], w.rows(), w.cols());
                }
            }
            ModelKind::HopfieldMLP => {
                let h = self.hopfield_field(&loc.v);
                for l in 0..nl {
                    let (s, hl) = (&loc.s[l], &h[l]);
                    put(l, l, &|r, c| if r == c { s[r] * hl[r] } else { 0.0 }, hl.len(), hl.len());
                }
                for l in 1..nl {
                    let w = &p.w_fwd[l - 1];
                    let (dr, dc) = (&loc.d[l], &loc.d[l - 1]);
                    put(l, l - 1, &|r, c| dr[r] * w.get(r, c) * dc[c], w.rows(), w.cols());
                    put(l - 1, l, &|r, c| dc[r] * w.get(c, r) * dr[c], w.cols(), w.rows());
                }
            }
            ModelKind::PCN => {
                let eta = self.net.pcn_step;
                let r = self.pcn_feedback(u);
                for l in 0..nl {
                    let n = loc.d[l].len();
                    let diag: Vec<f64> = (0..n)
                        .map(|i| 1.0 - eta + if l + 1 < nl { eta * loc.s[l][i] * r[l][i] } else { 0.0 })
                        .collect();
                    put(l, l, &|a, b| if a == b { diag[a] } else { 0.0 }, n, n);
                    if l + 1 < nl {
                        let prod = p.w_bwd[l].matmul(&p.w_fwd[l]).expect("chain shapes");
                        let d = &loc.d[l];
                        put(l, l, &|a, b| -eta * d[a] * prod.get(a, b) * d[b], n, n);
                        let wb = &p.w_bwd[l];
                        put(l, l + 1, &|a, b| eta * d[a] * wb.get(a, b), wb.rows(), wb.cols());
                    }
                    if l > 0 {
                        let w = &p.w_fwd[l - 1];
                        let d = &loc.d[l - 1];
                        put(l, l - 1, &|a, b| eta * w.get(a, b) * d[b], w.rows(), w.cols());
                    }
                }
            }
        }
        for i in 0..n {
            j.add_at(i, i, -1.0);
        }
        Ok(j)
    }

    /// `∂/∂θ (aᵀ J_F b)` with the state held fixed. The readout does not enter
    /// `J_F` at β = 0, so its gradient is zero.
    pub fn bilinear_grad(&self, u: &[f64], a: &[f64], b: &[f64]) -> ModelParams {
        let p = self.params();
        let nl = self.num_layers();
        let loc = self.local(u);
        let al = self.split(a);
        let bl = self.split(b);
        let mut g: ModelParams = p.zeros_like();
        match self.kind() {
            ModelKind::ReciprocalMLP | ModelKind::DirectFeedback => {
                for l in 1..nl {
                    g.w_fwd[l - 1].add_outer(al[l], &hadamard(&loc.d[l - 1], bl[l - 1]), 1.0);
                }
                for l in 0..g.w_bwd.len() {
                    g.w_bwd[l].add_outer(al[l], &hadamard(&loc.d[l + 1], bl[l + 1]), 1.0);
                }
                if let Some(fb) = &mut g.w_fb {
                    fb.add_outer(al[0], &hadamard(&loc.d[nl - 1], bl[nl - 1]), 1.0);
                }
            }
            ModelKind::HopfieldMLP => {
                let c: Vec<Vec<f64>> = (0..nl)
                    .map(|l| (0..al[l].len()).map(|i| al[l][i] * bl[l][i] * loc.s[l][i]).collect())
                    .collect();
                for l in 0..nl {
                    add_into(&mut g.b[l], &c[l]);
                }
                g.w_in.add_outer(&c[0], self.input, 1.0);
                for l in 1..nl {
                    let w = &mut g.w_fwd[l - 1];
                    w.add_outer(&c[l], &loc.v[l - 1], 1.0);
                    w.add_outer(&loc.v[l], &c[l - 1], 1.0);
                    w.add_outer(&hadamard(&loc.d[l], al[l]), &hadamard(&loc.d[l - 1], bl[l - 1]), 1.0);
                    w.add_outer(&hadamard(&loc.d[l], bl[l]), &hadamard(&loc.d[l - 1], al[l - 1]), 1.0);
                }
            }
            ModelKind::PCN => {
                let eta = self.net.pcn_step;
                let eps = self.pcn_errors(u);
                let e = self.pcn_error_tangent(&loc, &bl);
                let q = self.pcn_adjoint_error(&loc.d, &al);
                for l in 1..nl {
                    g.w_bwd[l - 1].add_outer(&hadamard(&loc.d[l - 1], al[l - 1]), &e[l], eta);
                    g.w_fwd[l - 1].add_outer(&q[l], &hadamard(&loc.d[l - 1], bl[l - 1]), -eta);
                }
                for l in 0..nl - 1 {
                    let c: Vec<f64> =
                        (0..al[l].len()).map(|i| al[l][i] * loc.s[l][i] * bl[l][i]).collect();
                    g.w_bwd[l].add_outer(&c, &eps[l + 1], eta);
                    let k = p.w_bwd[l].matvec_t(&c);
                    g.w_fwd[l].add_outer(&k, &loc.v[l], -eta);
                    for (gb, ki) in g.b[l + 1].iter_mut().zip(&k) {
                        *gb -= eta * ki;
                    }
                }
            }
        }
        g
    }
}
