//! Dense reference implementation used as a test oracle. Built straight from
//! the network's edge lists with explicit matrices and naive sums; shares no
//! code with the library's propagation or ranking paths.

#![allow(dead_code)]

use devrank::{AlgorithmKind, HeteroNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<f64>>;

pub struct Dense {
    pub n_d: usize,
    pub n_p: usize,
    /// `follow[to][from]`, column-stochastic with dangling columns uniform.
    pub follow: Matrix,
    /// `dp[p][d] = n(d,p) / Σ_q n(d,q)`.
    pub dp: Matrix,
    /// `pd[d][p] = n(d,p) / Σ_e n(e,p)`.
    pub pd: Matrix,
    /// `c[p][d] = 1` when d committed to p.
    pub c: Matrix,
}

impl Dense {
    pub fn new(net: &HeteroNetwork) -> Self {
        let (n_d, n_p) = (net.n_developers(), net.n_projects());
        let mut adj = vec![vec![0.0; n_d]; n_d];
        for &(f, t) in net.follows() {
            adj[t.index()][f.index()] = 1.0;
        }
        let mut follow = vec![vec![0.0; n_d]; n_d];
        for from in 0..n_d {
            let out: f64 = (0..n_d).map(|to| adj[to][from]).sum();
            for to in 0..n_d {
                follow[to][from] = if out == 0.0 { 1.0 / n_d as f64 } else { adj[to][from] / out };
            }
        }
        let mut counts = vec![vec![0.0; n_d]; n_p];
        for &(d, p, n) in net.commits() {
            counts[p.index()][d.index()] += n as f64;
        }
        let dev_total: Vec<f64> = (0..n_d).map(|d| (0..n_p).map(|p| counts[p][d]).sum()).collect();
        let proj_total: Vec<f64> = (0..n_p).map(|p| counts[p].iter().sum()).collect();
        let mut dp = vec![vec![0.0; n_d]; n_p];
        let mut pd = vec![vec![0.0; n_p]; n_d];
        let mut c = vec![vec![0.0; n_d]; n_p];
        for p in 0..n_p {
            for d in 0..n_d {
                if counts[p][d] > 0.0 {
                    dp[p][d] = counts[p][d] / dev_total[d];
                    pd[d][p] = counts[p][d] / proj_total[p];
                    c[p][d] = 1.0;
                }
            }
        }
        Self { n_d, n_p, follow, dp, pd, c }
    }

    pub fn ct(&self) -> Matrix {
        transpose(&self.c, self.n_d)
    }
}

pub fn transpose(m: &Matrix, cols: usize) -> Matrix {
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn mul(m: &Matrix, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn norm1(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    let n = v.len();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    } else {
        v.iter_mut().for_each(|x| *x = 1.0 / n as f64);
    }
    v
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub const ORACLE_THRESHOLD: f64 = 1e-14;
const ORACLE_MAX_ITERS: usize = 100_000;

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn pagerank(o: &Dense, alpha: f64) -> Vec<f64> {
    let mut r = uniform(o.n_d);
    for _ in 0..ORACLE_MAX_ITERS {
        let next = norm1(mul(&o.follow, &r).into_iter().map(|x| alpha * x + (1.0 - alpha) / o.n_d as f64).collect());
        let err = l1(&next, &r);
        r = next;
        if err < ORACLE_THRESHOLD {
            return r;
        }
    }
    panic!("oracle PageRank did not converge")
}

/// Jacobi iteration of `D ← a·F·D + b·B·P + (1−a−b)/n_d`, `P ← A·D`.
fn coupled(o: &Dense, mut d: Vec<f64>, a: f64, b: f64, to_proj: &Matrix, to_dev: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let mut p = uniform(o.n_p);
    let teleport = (1.0 - a - b).max(0.0) / o.n_d as f64;
    for _ in 0..ORACLE_MAX_ITERS {
        let np = norm1(mul(to_proj, &d));
        let f = mul(&o.follow, &d);
        let back = mul(to_dev, &p);
        let nd = norm1((0..o.n_d).map(|i| a * f[i] + b * back[i] + teleport).collect());
        let err = l1(&nd, &d) + l1(&np, &p);
        d = nd;
        p = np;
        if err < ORACLE_THRESHOLD {
            return (d, p);
        }
    }
    panic!("oracle coupled iteration did not converge")
}

/// Fixed point of `kind` computed densely.
pub fn solve(o: &Dense, kind: AlgorithmKind, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    match kind {
        AlgorithmKind::DevRank => coupled(o, pagerank(o, alpha), alpha, beta, &o.dp, &o.pd),
        AlgorithmKind::PageRank => {
            let d = pagerank(o, alpha);
            let p = norm1(mul(&o.c, &d));
            (d, p)
        }
        AlgorithmKind::Df => {
            let d = pagerank(o, alpha);
            let p = norm1(mul(&o.dp, &d));
            (d, p)
        }
        AlgorithmKind::Hits => coupled(o, uniform(o.n_d), 0.0, alpha, &o.c, &o.ct()),
        AlgorithmKind::Dc => coupled(o, uniform(o.n_d), 0.0, beta, &o.dp, &o.pd),
    }
}

/// Random network with `1..=max_d` developers and `1..=max_p` projects.
/// Some developers follow nobody and some commit nowhere.
pub fn random_network(seed: u64, max_d: usize, max_p: usize) -> HeteroNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_d = rng.gen_range(1..=max_d);
    let n_p = rng.gen_range(1..=max_p);
    let follow_p = rng.gen_range(0.0..0.4);
    let commit_p = rng.gen_range(0.1..0.6);
    let mut b = HeteroNetwork::builder();
    for d in 0..n_d {
        b.add_developer(&format!("d{d:02}"));
    }
    for p in 0..n_p {
        b.add_project(&format!("p{p:02}"));
    }
    for f in 0..n_d {
        for t in 0..n_d {
            if f != t && rng.gen_bool(follow_p) {
                b.add_follow(&format!("d{f:02}"), &format!("d{t:02}"));
            }
        }
    }
    for d in 0..n_d {
        for p in 0..n_p {
            if rng.gen_bool(commit_p) {
                b.add_commits(&format!("d{d:02}"), &format!("p{p:02}"), rng.gen_range(1..=20));
            }
        }
    }
    b.build()
}

/// Random `(alpha, beta)` with `alpha + beta <= 0.95`.
pub fn random_weights(seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let alpha = rng.gen_range(0.0..0.95);
    let beta = rng.gen_range(0.0..(0.95 - alpha));
    (alpha, beta)
}
