//! Monte Carlo estimation of the probability that four uniform elements form
//! an unmixed Beauville structure, and of the component statistics behind it.
//!
//! Sample `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so a
//! result depends only on the group, the sample count and the seed.

use std::time::Instant;

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::beauville::{sigma_prime_classes, GeneratingTriple};
use crate::group::{AbelianGroup, Group};
use crate::par;
use crate::perm::PermGroup;
use crate::psl2::{Psl2Group, SplitType};

const Z95: f64 = 1.959_963_984_540_054;

/// Per-element information the component statistics need.
pub trait ElementStats: Group {
    /// Split / non-split / unipotent type where the group has one.
    fn torus_type(&self, _x: &Self::Elem) -> Option<SplitType> {
        None
    }
    /// Prime whose divisibility of element orders is tracked: 2, or 3 in
    /// characteristic 2 where every involution is unipotent.
    fn tracked_prime(&self) -> u64 {
        2
    }
}

impl ElementStats for Psl2Group {
    fn torus_type(&self, x: &Self::Elem) -> Option<SplitType> {
        Some(self.split_type(x))
    }
    fn tracked_prime(&self) -> u64 {
        if self.p() == 2 {
            3
        } else {
            2
        }
    }
}

impl ElementStats for PermGroup {}
impl ElementStats for AbelianGroup {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub samples: u64,
    pub seed: u64,
    /// 0 = all cores, 1 = sequential.
    pub workers: usize,
    pub component_stats: bool,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig { samples: 20_000, seed: crate::DEFAULT_SEED, workers: 0, component_stats: true }
    }
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    [(centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub count: u64,
    pub trials: u64,
    pub value: f64,
    pub wilson: [f64; 2],
}

impl Fraction {
    pub fn new(count: u64, trials: u64) -> Self {
        let value = if trials == 0 { 0.0 } else { count as f64 / trials as f64 };
        Fraction { count, trials, value, wilson: wilson_interval(count, trials) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    /// Over sampled elements.
    pub split: Option<Fraction>,
    pub nonsplit: Option<Fraction>,
    pub unipotent: Option<Fraction>,
    /// Over sampled elements: order divisible by `tracked_prime`.
    pub tracked_prime: u64,
    pub order_divisible: Fraction,
    /// Over sampled pairs `(x, y)`: `x`, `y` and `xy` all split.
    pub triple_split: Option<Fraction>,
    pub generating: Fraction,
    /// Failing quadruples whose Σ-sets share an involution class (both pairs
    /// generating); a diagnostic, present only for quadruple sampling.
    pub shared_involution_failures: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub group: String,
    pub config: EstimationConfig,
    pub successes: u64,
    pub estimate: f64,
    pub wilson: [f64; 2],
    pub components: Option<ComponentStats>,
    pub elapsed_ms: Option<f64>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    success: u64,
    elements: u64,
    split: u64,
    nonsplit: u64,
    unipotent: u64,
    divisible: u64,
    pairs: u64,
    triple_split: u64,
    generating: u64,
    shared_involution: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.success += o.success;
        self.elements += o.elements;
        self.split += o.split;
        self.nonsplit += o.nonsplit;
        self.unipotent += o.unipotent;
        self.divisible += o.divisible;
        self.pairs += o.pairs;
        self.triple_split += o.triple_split;
        self.generating += o.generating;
        self.shared_involution += o.shared_involution;
        self
    }

    fn element<G: ElementStats>(&mut self, g: &G, x: &G::Elem) {
        self.elements += 1;
        match g.torus_type(x) {
            Some(SplitType::Split) => self.split += 1,
            Some(SplitType::NonSplit) => self.nonsplit += 1,
            Some(SplitType::Unipotent) => self.unipotent += 1,
            _ => {}
        }
        if g.element_order(x) % g.tracked_prime() == 0 {
            self.divisible += 1;
        }
    }

    fn pair<G: ElementStats>(&mut self, g: &G, x: &G::Elem, y: &G::Elem, generates: bool) {
        self.pairs += 1;
        if generates {
            self.generating += 1;
        }
        let xy = g.multiply(x, y);
        if [x, y, &xy].iter().all(|e| g.torus_type(e) == Some(SplitType::Split)) {
            self.triple_split += 1;
        }
    }

    fn components<G: ElementStats>(&self, g: &G, with_shared: bool) -> ComponentStats {
        let has_torus = g.torus_type(&g.identity()).is_some();
        let torus = |k| has_torus.then(|| Fraction::new(k, self.elements));
        ComponentStats {
            split: torus(self.split),
            nonsplit: torus(self.nonsplit),
            unipotent: torus(self.unipotent),
            tracked_prime: g.tracked_prime(),
            order_divisible: Fraction::new(self.divisible, self.elements),
            triple_split: has_torus.then(|| Fraction::new(self.triple_split, self.pairs)),
            generating: Fraction::new(self.generating, self.pairs),
            shared_involution_failures: with_shared.then_some(self.shared_involution),
        }
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn run_tallies(cfg: &EstimationConfig, f: impl Fn(u64) -> Tally + Sync + Send) -> Tally {
    const CHUNK: u64 = 256;
    let chunks = cfg.samples.div_ceil(CHUNK);
    let per_chunk = par::with_workers(cfg.workers, || {
        par::map_range(chunks, |c| {
            (c * CHUNK..((c + 1) * CHUNK).min(cfg.samples)).map(&f).fold(Tally::default(), Tally::merge)
        })
    });
    per_chunk.into_iter().fold(Tally::default(), Tally::merge)
}

/// Fraction of uniform quadruples `(x1, y1; x2, y2)` that are unmixed
/// Beauville structures, with the component statistics of the same samples.
pub fn estimate_beauville_probability<G: ElementStats>(group: &G, cfg: &EstimationConfig) -> EstimateResult {
    let start = Instant::now();
    let tally = run_tallies(cfg, |i| {
        let mut rng = sample_rng(cfg.seed, i);
        let q: [G::Elem; 4] = std::array::from_fn(|_| group.random_element(&mut rng));
        let mut t = Tally::default();
        let g1 = group.generates(&q[0], &q[1]);
        let g2 = group.generates(&q[2], &q[3]);
        if cfg.component_stats {
            for x in &q {
                t.element(group, x);
            }
            t.pair(group, &q[0], &q[1], g1);
            t.pair(group, &q[2], &q[3], g2);
        }
        if g1 && g2 {
            let o1: u128 = GeneratingTriple::new(group, &q[0], &q[1]).orders.iter().map(|&o| o as u128).product();
            let o2: u128 = GeneratingTriple::new(group, &q[2], &q[3]).orders.iter().map(|&o| o as u128).product();
            if o1.gcd(&o2) == 1 {
                t.success = 1;
            } else {
                let s1 = sigma_prime_classes(group, &q[0], &q[1]);
                let s2 = sigma_prime_classes(group, &q[2], &q[3]);
                let mut common = s1.intersection(&s2).peekable();
                if common.peek().is_none() {
                    t.success = 1;
                } else if common.any(|(r, _)| *r == 2) {
                    t.shared_involution = 1;
                }
            }
        }
        t
    });
    let components = cfg.component_stats.then(|| tally.components(group, true));
    EstimateResult {
        group: group.kind().to_string(),
        config: cfg.clone(),
        successes: tally.success,
        estimate: tally.success as f64 / cfg.samples.max(1) as f64,
        wilson: wilson_interval(tally.success, cfg.samples),
        components,
        elapsed_ms: Some(start.elapsed().as_secs_f64() * 1e3),
    }
}

/// Component statistics from `cfg.samples` uniform pairs `(x, y)`.
pub fn estimate_component_stats<G: ElementStats>(group: &G, cfg: &EstimationConfig) -> ComponentStats {
    let tally = run_tallies(cfg, |i| {
        let mut rng = sample_rng(cfg.seed, i);
        let x = group.random_element(&mut rng);
        let y = group.random_element(&mut rng);
        let mut t = Tally::default();
        t.element(group, &x);
        t.element(group, &y);
        t.pair(group, &x, &y, group.generates(&x, &y));
        t
    });
    tally.components(group, false)
}
