//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

use ldp_poison::graph::Graph;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Plain adjacency matrix with the textbook metric definitions.
pub struct Naive {
    adj: Vec<Vec<bool>>,
}

impl Naive {
    pub fn of(g: &Graph) -> Self {
        let n = g.num_nodes();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in g.edges() {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Naive { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].iter().filter(|&&b| b).count()
    }

    pub fn triangles(&self, i: usize) -> u64 {
        let mut t = 0;
        for j in 0..self.n() {
            for k in j + 1..self.n() {
                if self.adj[i][j] && self.adj[i][k] && self.adj[j][k] {
                    t += 1;
                }
            }
        }
        t
    }

    pub fn all_triangles(&self) -> u64 {
        let n = self.n();
        let mut t = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if self.adj[a][b] && self.adj[a][c] && self.adj[b][c] {
                        t += 1;
                    }
                }
            }
        }
        t
    }

    pub fn clustering(&self, i: usize) -> f64 {
        let d = self.degree(i);
        if d < 2 {
            0.0
        } else {
            self.triangles(i) as f64 / (d * (d - 1) / 2) as f64
        }
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn exact_degree_gain(m: usize, r: usize, n: usize, d: f64) -> BigRational {
    let n1 = int(n - 1);
    let links = int(r.min(d.floor() as usize));
    int(m) * int(r) / &n1 * (links / int(r) - rat(d) / &n1)
}

pub fn exact_cc_gain(m: usize, r: usize, n: usize, p: f64, d: f64) -> BigRational {
    let (p, d) = (rat(p), rat(d));
    let one = BigRational::one();
    let two = int(2);
    let pp = &d / int(n - 1);
    let q = &one - &pp;
    let denom = &two * &pp * &q * &q + &pp * &pp * &q + int(3) * &q * &q * &q;
    int(r) * (&two / (&p * &p * (&two * &p - &one))) * (&one / (&d * (&d - &one))) * (int(m) / denom)
}

pub fn close_to_exact(x: f64, exact: &BigRational) -> bool {
    let e = exact.to_f64().unwrap();
    if exact.is_zero() {
        x.abs() < 1e-300
    } else {
        ((x - e) / e).abs() < 1e-9
    }
}

