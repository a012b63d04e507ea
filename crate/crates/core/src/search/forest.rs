//! Bagged regression trees over categorical slot features.
//!
//! Each feature is a small categorical (angle index). Splits partition the
//! levels present at a node into two subsets; for squared error the best
//! subset split is a prefix of the levels ordered by mean target, so only
//! `L - 1` candidates per feature are scored. Levels never seen at a node
//! are routed right.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        /// Bit `l` set when level `l` goes left.
        left_levels: u16,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict(&self, x: &[u8]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    left_levels,
                    left,
                    right,
                } => {
                    at = if left_levels >> x[feature] & 1 == 1 {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    /// Grows a tree on the bootstrap `rows` of `(xs, ys)` without depth
    /// limit; nodes with fewer than two samples or no variance-reducing
    /// split become leaves.
    pub fn fit(xs: &[Vec<u8>], ys: &[f64], mut rows: Vec<usize>, levels: u8) -> Self {
        let data = Flat::new(xs, ys);
        Self::fit_flat(&data, &mut rows, levels as usize)
    }

    fn fit_flat(data: &Flat<'_>, rows: &mut [usize], levels: usize) -> Self {
        let mut tree = Self { nodes: Vec::new() };
        let mut scratch = Scratch::new(data.dims, levels);
        tree.grow(data, rows, &mut scratch);
        tree
    }

    fn grow(&mut self, data: &Flat<'_>, rows: &mut [usize], scratch: &mut Scratch) -> usize {
        let id = self.nodes.len();
        let sum: f64 = rows.iter().map(|&r| data.ys[r]).sum();
        self.nodes.push(Node::Leaf(sum / rows.len() as f64));
        if rows.len() < 2 {
            return id;
        }
        let Some((feature, left_levels)) = best_split(data, rows, sum, scratch) else {
            return id;
        };
        let goes_left = |r: usize| left_levels >> data.row(r)[feature] & 1 == 1;
        // Stable partition keeps the summation order reproducible.
        let mut right_rows = Vec::new();
        let mut split = 0;
        for i in 0..rows.len() {
            let r = rows[i];
            if goes_left(r) {
                rows[split] = r;
                split += 1;
            } else {
                right_rows.push(r);
            }
        }
        rows[split..].copy_from_slice(&right_rows);
        let (l, r) = rows.split_at_mut(split);
        let left = self.grow(data, l, scratch);
        let right = self.grow(data, r, scratch);
        self.nodes[id] = Node::Split {
            feature,
            left_levels,
            left,
            right,
        };
        id
    }
}

/// Row-major copy of the training features.
struct Flat<'a> {
    x: Vec<u8>,
    dims: usize,
    ys: &'a [f64],
}

impl<'a> Flat<'a> {
    fn new(xs: &[Vec<u8>], ys: &'a [f64]) -> Self {
        let dims = xs.first().map_or(0, Vec::len);
        let mut x = Vec::with_capacity(xs.len() * dims);
        for row in xs {
            assert_eq!(row.len(), dims, "ragged training features");
            x.extend_from_slice(row);
        }
        Self { x, dims, ys }
    }

    fn row(&self, r: usize) -> &[u8] {
        &self.x[r * self.dims..(r + 1) * self.dims]
    }
}

/// Per-(feature, level) sums and counts reused across nodes.
struct Scratch {
    levels: usize,
    sums: Vec<f64>,
    counts: Vec<usize>,
    present: Vec<usize>,
}

impl Scratch {
    fn new(dims: usize, levels: usize) -> Self {
        Self {
            levels,
            sums: vec![0.0; dims * levels],
            counts: vec![0; dims * levels],
            present: Vec::with_capacity(levels),
        }
    }
}

/// Highest `Σ_L²/n_L + Σ_R²/n_R` over all features and ordered-prefix
/// level splits, if it beats the unsplit node.
fn best_split(data: &Flat<'_>, rows: &[usize], total: f64, scratch: &mut Scratch) -> Option<(usize, u16)> {
    let n = rows.len();
    let parent = total * total / n as f64;
    let levels = scratch.levels;
    scratch.sums.iter_mut().for_each(|s| *s = 0.0);
    scratch.counts.iter_mut().for_each(|c| *c = 0);
    for &r in rows {
        let y = data.ys[r];
        for (f, &l) in data.row(r).iter().enumerate() {
            let at = f * levels + l as usize;
            scratch.sums[at] += y;
            scratch.counts[at] += 1;
        }
    }
    let mut best: Option<(f64, usize, u16)> = None;
    for f in 0..data.dims {
        let sums = &scratch.sums[f * levels..(f + 1) * levels];
        let counts = &scratch.counts[f * levels..(f + 1) * levels];
        let present = &mut scratch.present;
        present.clear();
        present.extend((0..levels).filter(|&l| counts[l] > 0));
        if present.len() < 2 {
            continue;
        }
        present.sort_by(|&a, &b| {
            let (ma, mb) = (sums[a] / counts[a] as f64, sums[b] / counts[b] as f64);
            ma.total_cmp(&mb).then(a.cmp(&b))
        });
        let (mut s_left, mut n_left, mut mask) = (0.0, 0usize, 0u16);
        for &l in &present[..present.len() - 1] {
            s_left += sums[l];
            n_left += counts[l];
            mask |= 1 << l;
            let s_right = total - s_left;
            let score = s_left * s_left / n_left as f64 + s_right * s_right / (n - n_left) as f64;
            if best.is_none_or(|(b, _, _)| score > b) {
                best = Some((score, f, mask));
            }
        }
    }
    let (score, f, mask) = best?;
    // Relative slack so pure rounding noise never creates a split.
    (score > parent + 1e-12 * parent.abs().max(1.0)).then_some((f, mask))
}

/// Random-forest surrogate: bootstrap-bagged [`RegressionTree`]s whose
/// predictions are averaged.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateForest {
    trees: Vec<RegressionTree>,
    training_size: usize,
}

impl SurrogateForest {
    /// Fits `n_trees` trees, each on a bootstrap resample drawn from `rng`.
    pub fn fit(xs: &[Vec<u8>], ys: &[f64], levels: u8, n_trees: usize, rng: &mut ChaCha8Rng) -> Self {
        assert_eq!(xs.len(), ys.len());
        assert!(!xs.is_empty(), "forest needs training data");
        let n = xs.len();
        let data = Flat::new(xs, ys);
        let trees = (0..n_trees)
            .map(|_| {
                let mut rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                RegressionTree::fit_flat(&data, &mut rows, levels as usize)
            })
            .collect();
        Self {
            trees,
            training_size: n,
        }
    }

    pub fn predict(&self, x: &[u8]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn num_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn training_size(&self) -> usize {
        self.training_size
    }
}
