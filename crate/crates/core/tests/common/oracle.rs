//! Brute-force reference implementations, written without reference to the
//! library code paths they check.

use num_rational::Ratio;

/// Distance correlation straight from the definition: explicit distance
/// matrices, separate row/column/grand means, V-statistic averages.
pub fn dcor(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    assert_eq!(n, y.len());
    let centre = |v: &[f64]| -> Vec<Vec<f64>> {
        let d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (v[i] - v[j]).abs()).collect()).collect();
        let row: Vec<f64> = (0..n).map(|i| d[i].iter().sum::<f64>() / n as f64).collect();
        let col: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| d[i][j]).sum::<f64>() / n as f64)
            .collect();
        let grand: f64 = d.iter().flatten().sum::<f64>() / (n * n) as f64;
        (0..n)
            .map(|i| (0..n).map(|j| d[i][j] - row[i] - col[j] + grand).collect())
            .collect()
    };
    let a = centre(x);
    let b = centre(y);
    let mean_prod = |p: &Vec<Vec<f64>>, q: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += p[i][j] * q[i][j];
            }
        }
        s / (n * n) as f64
    };
    let vxy = mean_prod(&a, &b);
    let vxx = mean_prod(&a, &a);
    let vyy = mean_prod(&b, &b);
    if vxx == 0.0 || vyy == 0.0 {
        return 0.0;
    }
    let r2 = vxy.max(0.0) / (vxx * vyy).sqrt();
    r2.sqrt().min(1.0)
}

/// Simple undirected graph as an adjacency matrix.
pub type Adjacency = Vec<Vec<bool>>;

pub struct Enumeration {
    pub edges: u64,
    /// Σ_v triangles through v.
    pub closed: u64,
    /// Σ_v connected triples centred on v.
    pub triples: u64,
    /// Per-vertex (triangles, triples).
    pub local: Vec<(u64, u64)>,
}

/// Visits every unordered vertex triple and every centred pair of
/// neighbours explicitly.
pub fn enumerate(adj: &Adjacency) -> Enumeration {
    let n = adj.len();
    let mut edges = 0;
    for i in 0..n {
        for j in i + 1..n {
            if adj[i][j] {
                edges += 1;
            }
        }
    }
    let mut local = vec![(0u64, 0u64); n];
    for v in 0..n {
        for u in 0..n {
            for w in u + 1..n {
                if u == v || w == v || !adj[v][u] || !adj[v][w] {
                    continue;
                }
                local[v].1 += 1;
                if adj[u][w] {
                    local[v].0 += 1;
                }
            }
        }
    }
    // Cross-check via unordered triples: a triangle closes 3 triples.
    let mut triangles = 0u64;
    let mut open = 0u64;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let e = adj[a][b] as u64 + adj[b][c] as u64 + adj[a][c] as u64;
                match e {
                    3 => triangles += 1,
                    2 => open += 1,
                    _ => {}
                }
            }
        }
    }
    let closed: u64 = local.iter().map(|l| l.0).sum();
    let triples: u64 = local.iter().map(|l| l.1).sum();
    assert_eq!(closed, 3 * triangles);
    assert_eq!(triples, 3 * triangles + open);
    Enumeration {
        edges,
        closed,
        triples,
        local,
    }
}

pub fn density(e: &Enumeration, n: usize) -> Ratio<u64> {
    if n < 2 {
        return Ratio::from_integer(0);
    }
    Ratio::new(2 * e.edges, (n * (n - 1)) as u64)
}

pub fn global_clustering(e: &Enumeration) -> Ratio<u64> {
    if e.triples == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(e.closed, e.triples)
    }
}

pub fn avg_local_clustering(e: &Enumeration) -> Ratio<u128> {
    let n = e.local.len() as u128;
    if n == 0 {
        return Ratio::from_integer(0);
    }
    let mut sum = Ratio::from_integer(0u128);
    for &(l, t) in &e.local {
        if t > 0 {
            sum += Ratio::new(l as u128, t as u128);
        }
    }
    sum / Ratio::from_integer(n)
}
