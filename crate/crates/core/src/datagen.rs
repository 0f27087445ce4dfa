//! Synthetic benchmark generators with ground-truth graphs: six small
//! linear structures (acyclic, engineered-unfaithful and cyclic variants)
//! and a multi-species Ricker ecosystem. Everything is a pure function of
//! its spec and seed, so datasets are bit-reproducible.

use crate::graph::{SummaryGraph, VarId, WindowGraph};
use crate::stats::Dataset;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const BURN_IN: usize = 100;
const MAX_RESAMPLES: usize = 50;
const EXPLOSION_BOUND: f64 = 1e8;

/// The simulated causal structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    VStructure,
    Fork,
    Diamond,
    UnfaithfulDiamond,
    CyclicFork,
    CyclicDiamond,
}

impl Structure {
    pub const ALL: [Structure; 6] = [
        Structure::VStructure,
        Structure::Fork,
        Structure::Diamond,
        Structure::UnfaithfulDiamond,
        Structure::CyclicFork,
        Structure::CyclicDiamond,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Structure::VStructure => "v-structure",
            Structure::Fork => "fork",
            Structure::Diamond => "diamond",
            Structure::UnfaithfulDiamond => "unfaithful-diamond",
            Structure::CyclicFork => "cyclic-fork",
            Structure::CyclicDiamond => "cyclic-diamond",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Structure::ALL
            .into_iter()
            .find(|s| s.id() == id)
            .ok_or_else(|| Error::UnknownId {
                id: id.to_string(),
                noun: "structure",
            })
    }

    fn names(&self) -> Vec<&'static str> {
        match self {
            Structure::VStructure | Structure::Fork | Structure::CyclicFork => {
                vec!["X", "Y", "Z"]
            }
            _ => vec!["X", "Y", "Z", "W"],
        }
    }

    /// Directed cross edges of the structure, in a fixed order.
    fn cross(&self) -> Vec<(usize, usize)> {
        match self {
            Structure::VStructure => vec![(0, 2), (1, 2)],
            Structure::Fork => vec![(0, 1), (0, 2)],
            Structure::Diamond | Structure::UnfaithfulDiamond => {
                vec![(0, 1), (0, 2), (1, 3), (2, 3)]
            }
            Structure::CyclicFork => vec![(0, 1), (1, 0), (0, 2), (2, 0)],
            Structure::CyclicDiamond => vec![
                (0, 1),
                (1, 0),
                (0, 2),
                (2, 0),
                (1, 3),
                (3, 1),
                (2, 3),
                (3, 2),
            ],
        }
    }

    fn has_self_causes(&self) -> bool {
        !matches!(self, Structure::UnfaithfulDiamond)
    }
}

/// Noise family for the linear structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Uniform,
    Gaussian,
}

impl NoiseKind {
    pub fn id(&self) -> &'static str {
        match self {
            NoiseKind::Uniform => "uniform",
            NoiseKind::Gaussian => "gaussian",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "uniform" => Ok(NoiseKind::Uniform),
            "gaussian" => Ok(NoiseKind::Gaussian),
            _ => Err(Error::UnknownId {
                id: id.to_string(),
                noun: "noise",
            }),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            NoiseKind::Uniform => rng.gen_range(-1.0..1.0),
            NoiseKind::Gaussian => StandardNormal.sample(rng),
        }
    }
}

/// How cross-edge lags are chosen when sampling a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagPolicy {
    /// Each parent independently instantaneous or lag 1, rejecting draws
    /// that would close an instantaneous cycle.
    Random,
    AllInstantaneous,
    AllLagged,
}

/// One realized cross edge of a linear structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSpec {
    pub src: usize,
    pub dst: usize,
    pub lag: usize,
    pub coeff: f64,
}

/// A fully realized draw of a linear structure: coefficients, lags and
/// noise settings. Feeding the same spec to [`gen_structure`] twice gives
/// bit-identical data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScmSpec {
    pub structure: Structure,
    pub noise: NoiseKind,
    pub noise_scale: f64,
    pub t: usize,
    pub seed: u64,
    /// Self coefficient per variable (zero means no self cause).
    pub self_coeffs: Vec<f64>,
    pub cross_edges: Vec<EdgeSpec>,
}

fn draw_coeff(rng: &mut ChaCha8Rng) -> f64 {
    let mag = rng.gen_range(0.1..1.0);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

impl ScmSpec {
    pub fn sample(structure: Structure, noise: NoiseKind, t: usize, seed: u64) -> Self {
        Self::sample_attempt(structure, noise, t, seed, LagPolicy::Random, 0)
    }

    pub fn sample_with_lags(
        structure: Structure,
        noise: NoiseKind,
        t: usize,
        seed: u64,
        lags: LagPolicy,
    ) -> Self {
        Self::sample_attempt(structure, noise, t, seed, lags, 0)
    }

    fn sample_attempt(
        structure: Structure,
        noise: NoiseKind,
        t: usize,
        seed: u64,
        lags: LagPolicy,
        attempt: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2 * attempt);
        let d = structure.names().len();
        let cross_pairs = structure.cross();

        let self_coeffs: Vec<f64> = (0..d)
            .map(|_| {
                if structure.has_self_causes() {
                    draw_coeff(&mut rng)
                } else {
                    0.0
                }
            })
            .collect();

        let mut coeffs: Vec<f64> = cross_pairs.iter().map(|_| draw_coeff(&mut rng)).collect();
        if structure == Structure::UnfaithfulDiamond {
            // Engineered path cancellation: the X->Y->W and X->Z->W
            // contributions to cov(X, W) sum to zero exactly.
            let (a_xy, a_xz, a_zw) = (coeffs[0], coeffs[1], coeffs[3]);
            coeffs[2] = -a_xz * a_zw / a_xy;
        }

        let mut lags_vec = vec![0; cross_pairs.len()];
        if structure != Structure::UnfaithfulDiamond {
            let mut tries = 0;
            loop {
                let candidate: Vec<usize> = cross_pairs
                    .iter()
                    .map(|_| match lags {
                        LagPolicy::AllInstantaneous => 0,
                        LagPolicy::AllLagged => 1,
                        LagPolicy::Random => usize::from(rng.gen_bool(0.5)),
                    })
                    .collect();
                let acyclic = instantaneous_part_is_acyclic(d, &cross_pairs, &candidate);
                // Fixed policies cannot redraw; random draws fall back to
                // all-lagged (always acyclic) after too many rejections.
                if acyclic || lags != LagPolicy::Random {
                    lags_vec = candidate;
                    break;
                }
                tries += 1;
                if tries > 100 {
                    lags_vec = vec![1; cross_pairs.len()];
                    break;
                }
            }
        }

        let cross_edges = cross_pairs
            .iter()
            .zip(&lags_vec)
            .zip(&coeffs)
            .map(|((&(src, dst), &lag), &coeff)| EdgeSpec {
                src,
                dst,
                lag,
                coeff,
            })
            .collect();

        ScmSpec {
            structure,
            noise,
            noise_scale: 0.1,
            t,
            seed,
            self_coeffs,
            cross_edges,
        }
    }

    /// Ground-truth graphs realized by this draw.
    pub fn graphs(&self) -> Result<(WindowGraph, SummaryGraph)> {
        let mut wcg = WindowGraph::new(self.structure.names(), 1)?;
        for (v, &a) in self.self_coeffs.iter().enumerate() {
            if a != 0.0 {
                wcg.add_lagged(VarId(v), 1, VarId(v))?;
            }
        }
        for e in &self.cross_edges {
            if e.lag == 0 {
                wcg.add_inst(VarId(e.src), VarId(e.dst))?;
            } else {
                wcg.add_lagged(VarId(e.src), e.lag, VarId(e.dst))?;
            }
        }
        let scg = wcg.to_summary_graph();
        Ok((wcg, scg))
    }
}

fn instantaneous_part_is_acyclic(d: usize, pairs: &[(usize, usize)], lags: &[usize]) -> bool {
    // Kahn over the lag-0 edges only.
    let mut indeg = vec![0usize; d];
    let edges: Vec<(usize, usize)> = pairs
        .iter()
        .zip(lags)
        .filter(|(_, &l)| l == 0)
        .map(|(&e, _)| e)
        .collect();
    for &(_, b) in &edges {
        indeg[b] += 1;
    }
    let mut ready: Vec<usize> = (0..d).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for &(a, b) in &edges {
            if a == v {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.push(b);
                }
            }
        }
    }
    seen == d
}

/// Simulates a linear SCM with edges `(src, lag, dst, coeff)`, evaluating
/// the instantaneous assignments in topological order. The first recorded
/// row comes after a discarded burn-in. Noise is pre-drawn per
/// (row, variable index) so draws do not depend on the evaluation order.
fn simulate_linear(
    names: &[&str],
    edges: &[(usize, usize, usize, f64)],
    noise: NoiseKind,
    noise_scale: f64,
    t: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    let d = names.len();
    let total = BURN_IN + t;
    let draws: Vec<Vec<f64>> = (0..total)
        .map(|_| (0..d).map(|_| noise.draw(rng)).collect())
        .collect();

    let inst: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(_, lag, _, _)| lag == 0)
        .map(|&(s, _, dst, _)| (s, dst))
        .collect();
    let topo = {
        let mut g = WindowGraph::new(names.to_vec(), 1)?;
        for &(s, dst) in &inst {
            g.add_inst(VarId(s), VarId(dst))?;
        }
        g.instantaneous_topo_order()
    };

    let mut vals = vec![vec![0.0f64; total]; d];
    for row in 0..total {
        for &VarId(v) in &topo {
            let mut acc = noise_scale * draws[row][v];
            for &(src, lag, dst, coeff) in edges {
                if dst == v && row >= lag {
                    acc += coeff * vals[src][row - lag];
                }
            }
            if !acc.is_finite() || acc.abs() > EXPLOSION_BOUND {
                return Err(Error::Explosive(0));
            }
            vals[v][row] = acc;
        }
    }

    let cols: Vec<Vec<f64>> = vals.into_iter().map(|c| c[BURN_IN..].to_vec()).collect();
    Dataset::new(names.to_vec(), cols)
}

/// Simulates one realized spec. Non-finite trajectories surface as
/// [`Error::Explosive`]; use [`gen_structure_auto`] to resample instead.
pub fn gen_structure(spec: &ScmSpec) -> Result<(Dataset, WindowGraph, SummaryGraph)> {
    let (wcg, scg) = spec.graphs()?;
    let mut edges: Vec<(usize, usize, usize, f64)> = Vec::new();
    for (v, &a) in spec.self_coeffs.iter().enumerate() {
        if a != 0.0 {
            edges.push((v, 1, v, a));
        }
    }
    for e in &spec.cross_edges {
        edges.push((e.src, e.lag, e.dst, e.coeff));
    }
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    noise_rng.set_stream(1);
    let data = simulate_linear(
        &spec.structure.names(),
        &edges,
        spec.noise,
        spec.noise_scale,
        spec.t,
        &mut noise_rng,
    )?;
    Ok((data, wcg, scg))
}

/// Samples a spec and simulates it, redrawing the coefficients (bounded
/// number of times) when the trajectory diverges.
pub fn gen_structure_auto(
    structure: Structure,
    noise: NoiseKind,
    t: usize,
    seed: u64,
) -> Result<(ScmSpec, Dataset, WindowGraph, SummaryGraph)> {
    for attempt in 0..MAX_RESAMPLES as u64 {
        let spec = ScmSpec::sample_attempt(structure, noise, t, seed, LagPolicy::Random, attempt);
        match gen_structure(&spec) {
            Ok((data, wcg, scg)) => return Ok((spec, data, wcg, scg)),
            Err(Error::Explosive(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Explosive(MAX_RESAMPLES))
}

fn draw_moderate_coeff(rng: &mut ChaCha8Rng) -> f64 {
    let mag = rng.gen_range(0.2..0.5);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

/// Five-variable running example (gamma = 2) with freshly drawn
/// coefficients and uniform noise; returns the data and the realized WCG.
/// Coefficient magnitudes are drawn from [0.2, 0.5): strong enough to
/// detect at desk-scale sample sizes, mild enough to avoid the
/// collinearity that larger draws create in this densely connected
/// system.
pub fn gen_running_example(t: usize, seed: u64) -> Result<(Dataset, WindowGraph)> {
    let names = ["X", "Y", "Z", "W", "U"];
    let (x, y, z, w, u) = (0, 1, 2, 3, 4);
    // (src, lag, dst) of the fixed structure.
    let shape: [(usize, usize, usize); 14] = [
        (x, 1, x),
        (y, 0, x),
        (z, 0, x),
        (y, 1, y),
        (x, 1, y),
        (w, 2, y),
        (z, 1, z),
        (x, 1, z),
        (y, 0, z),
        (w, 1, z),
        (w, 1, w),
        (y, 0, w),
        (z, 0, w),
        (u, 1, u),
    ];
    let full = |coeffs: &[f64], wu: f64| -> Vec<(usize, usize, usize, f64)> {
        let mut e: Vec<(usize, usize, usize, f64)> = shape
            .iter()
            .zip(coeffs)
            .map(|(&(s, l, d), &c)| (s, l, d, c))
            .collect();
        e.push((w, 0, u, wu));
        e
    };

    for attempt in 0..MAX_RESAMPLES as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2 * attempt);
        let coeffs: Vec<f64> = shape
            .iter()
            .map(|_| draw_moderate_coeff(&mut rng))
            .collect();
        let wu = draw_moderate_coeff(&mut rng);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
        noise_rng.set_stream(2 * attempt + 1);
        match simulate_linear(
            &names,
            &full(&coeffs, wu),
            NoiseKind::Uniform,
            0.1,
            t,
            &mut noise_rng,
        ) {
            Ok(data) => {
                let mut wcg = WindowGraph::new(names.to_vec(), 2)?;
                for &(s, l, d) in &shape {
                    if l == 0 {
                        wcg.add_inst(VarId(s), VarId(d))?;
                    } else {
                        wcg.add_lagged(VarId(s), l, VarId(d))?;
                    }
                }
                wcg.add_inst(VarId(w), VarId(u))?;
                return Ok((data, wcg));
            }
            Err(Error::Explosive(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Explosive(MAX_RESAMPLES))
}

/// Parameters of the multi-species Ricker simulation. The niche width,
/// step size, stationary abundance and the random-graph construction are
/// conventions, recorded here and overridable.
#[derive(Debug, Clone, PartialEq)]
pub struct RickerParams {
    pub species: usize,
    pub t: usize,
    pub seed: u64,
    /// Fixed environmental value driving the niche term.
    pub environment: f64,
    /// Predator extinction rate (mu).
    pub extinction: f64,
    /// Standard deviation of the Gaussian log-scale noise.
    pub noise_sd: f64,
    /// Niche width (sigma_y).
    pub niche_width: f64,
    /// Discretization step (Delta t).
    pub step: f64,
    /// Stationary abundance scale for prey.
    pub stationary_abundance: f64,
    /// Trophic levels of the random interaction graph.
    pub trophic_levels: usize,
}

impl RickerParams {
    pub fn new(species: usize, seed: u64) -> Self {
        Self {
            species,
            t: 1000,
            seed,
            environment: 0.5,
            extinction: 0.05,
            noise_sd: 0.2,
            niche_width: 0.2,
            step: 0.25,
            stationary_abundance: 1.0,
            trophic_levels: 3,
        }
    }
}

/// Near-equal level sizes, larger levels at the bottom.
fn level_sizes(species: usize, levels: usize) -> Vec<usize> {
    let base = species / levels;
    let extra = species % levels;
    (0..levels).map(|k| base + usize::from(k < extra)).collect()
}

/// Simulates the multi-species Ricker map. Returns the abundances and the
/// true summary graph: every predation link bidirected, plus a self loop
/// per species.
#[allow(clippy::needless_range_loop)]
pub fn gen_ricker(p: &RickerParams) -> Result<(Dataset, SummaryGraph)> {
    if p.species == 0 || p.trophic_levels == 0 {
        return Err(Error::InvalidParameter(
            "species and levels must be positive".into(),
        ));
    }
    let s = p.species;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);

    // Assign species to trophic levels: 0..sizes[0] are basal prey.
    let sizes = level_sizes(s, p.trophic_levels.min(s));
    let mut level_of = Vec::with_capacity(s);
    for (k, &sz) in sizes.iter().enumerate() {
        level_of.extend(std::iter::repeat_n(k, sz));
    }
    let members = |k: usize| -> Vec<usize> { (0..s).filter(|&i| level_of[i] == k).collect() };

    // Predation links (predator, prey), predator one level above its prey.
    let mut links: Vec<(usize, usize)> = Vec::new();
    for pred in 0..s {
        let k = level_of[pred];
        if k == 0 {
            continue;
        }
        let lower = members(k - 1);
        let prey = lower[rng.gen_range(0..lower.len())];
        links.push((pred, prey));
    }
    let connected = |links: &[(usize, usize)]| -> bool {
        let mut adj = vec![Vec::new(); s];
        for &(a, b) in links {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; s];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == s
    };
    let mut guard = 0;
    while sizes.len() > 1 && !connected(&links) {
        let pred_level = rng.gen_range(1..sizes.len());
        let preds = members(pred_level);
        let lower = members(pred_level - 1);
        let pred = preds[rng.gen_range(0..preds.len())];
        let prey = lower[rng.gen_range(0..lower.len())];
        if !links.contains(&(pred, prey)) {
            links.push((pred, prey));
        }
        guard += 1;
        if guard > 500 {
            return Err(Error::InvalidParameter(
                "could not connect the interaction graph".into(),
            ));
        }
    }

    // Interaction matrix: a[i][j] is the effect of species j on species i.
    let mut a = vec![vec![0.0f64; s]; s];
    for i in 0..s {
        a[i][i] = -rng.gen_range(0.2..0.8);
    }
    for &(pred, prey) in &links {
        a[prey][pred] = -rng.gen_range(0.2..0.8);
        a[pred][prey] = rng.gen_range(0.2..0.8);
    }
    let niche: Vec<f64> = (0..s).map(|_| rng.gen_range(0.0..1.0)).collect();

    let growth_env: Vec<f64> = (0..s)
        .map(|i| {
            let dist = niche[i] - p.environment;
            p.stationary_abundance
                * (-a[i][i])
                * (-dist * dist / (2.0 * p.niche_width * p.niche_width)).exp()
        })
        .collect();

    let mut cols = vec![vec![0.0f64; p.t]; s];
    let mut current = vec![1.0f64; s];
    for row in 0..p.t {
        for (i, col) in cols.iter_mut().enumerate() {
            col[row] = current[i];
        }
        let prev = current.clone();
        for i in 0..s {
            let interaction: f64 = (0..s).map(|j| a[i][j] * prev[j]).sum();
            let growth = if level_of[i] == 0 {
                interaction + growth_env[i]
            } else {
                interaction - p.extinction
            };
            let eps: f64 = p.noise_sd * rng.sample::<f64, _>(StandardNormal);
            current[i] = prev[i] * (p.step * growth + eps).exp();
            if !current[i].is_finite() {
                return Err(Error::Explosive(0));
            }
        }
    }

    let names: Vec<String> = (0..s).map(|i| format!("S{i}")).collect();
    if cols.iter().all(|c| c.iter().all(|&v| v == 0.0)) {
        eprintln!("warning: all species extinct; dataset kept but degenerate");
    }
    let data = Dataset::new(names.clone(), cols)?;

    let mut scg = SummaryGraph::new(names)?;
    for &(pred, prey) in &links {
        scg.add_edge(VarId(pred), VarId(prey))?;
        scg.add_edge(VarId(prey), VarId(pred))?;
    }
    for i in 0..s {
        scg.add_self_loop(VarId(i));
    }
    Ok((data, scg))
}
