use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use critreg::dynamics::{self, ActionSpec};
use critreg::exact_pl::rational::{fmt_rational, parse_rational, to_f64};
use critreg::exact_pl::{GenSet, GroupWord, Interval, PLHomeo, Rational};
use critreg::feasibility;
use critreg::io::{fmt_real, ActionFile, WitnessFile};
use critreg::regularity;
use critreg::stochastic::{self, SeqWeight};
use critreg::tsuboi::{self, Params};

#[derive(Parser)]
#[command(name = "critreg", version, about = "Interval dynamics, nesting witnesses and regularity diagnostics")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact operations on PL maps from an action file.
    Pl {
        #[command(subcommand)]
        op: PlOp,
    },
    /// Bounded-budget searches on an action file.
    Dynamics {
        #[command(subcommand)]
        op: DynOp,
    },
    /// The nested lamplighter construction.
    Tsuboi {
        #[command(subcommand)]
        op: TsuboiOp,
    },
    /// Parameter feasibility for the construction.
    Feasibility {
        #[command(subcommand)]
        op: FeasOp,
    },
    /// Nesting witness files.
    Nesting {
        #[command(subcommand)]
        op: NestOp,
    },
    /// Monte Carlo summability checks.
    Stochastic {
        #[command(subcommand)]
        op: StochOp,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    file: String,
    /// Generator name.
    #[arg(long, conflicts_with = "word")]
    gen: Option<String>,
    /// Word such as "A B^-1", applied right to left.
    #[arg(long)]
    word: Option<String>,
}

#[derive(Subcommand)]
enum PlOp {
    Compose(Target),
    Invert(Target),
    Evaluate {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    Support(Target),
    /// Re-emits the file in canonical form.
    Normalize {
        #[arg(long)]
        file: String,
    },
}

#[derive(Args)]
struct ActionArgs {
    #[arg(long)]
    file: String,
    /// Word budget (default: the file's).
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct CentralArgs {
    #[command(flatten)]
    action: ActionArgs,
    /// Generator of the file playing the central element; excluded from the action.
    #[arg(long, default_value = "c")]
    centralizer: String,
    /// Window `LO HI` on which commutation is required.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    window: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelSeed {
    Tower,
    F,
}

#[derive(Subcommand)]
enum DynOp {
    TwoChain(ActionArgs),
    CrossedPair(ActionArgs),
    Conradian(ActionArgs),
    Classify(ActionArgs),
    CentralizerObstruction(CentralArgs),
    ExtractNesting {
        #[command(flatten)]
        central: CentralArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Steps of condition (ii) checked before returning.
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        /// Writes the witness file here.
        #[arg(long)]
        out: Option<String>,
    },
    FCheck {
        #[arg(long, default_value_t = 2)]
        budget: usize,
    },
    /// Emits a periodized model action with its central element `c`.
    Model {
        #[arg(long, value_enum)]
        seed: ModelSeed,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 12)]
        to: i64,
        #[arg(long, default_value_t = 1)]
        budget: usize,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    qprime: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
}

impl ParamArgs {
    /// Explicit tuple, or a feasible one found for `tau`.
    fn params(&self) -> Result<Params, String> {
        match (self.p, self.q, self.qprime, self.r) {
            (Some(p), Some(q), Some(qp), Some(r)) => Params::new(self.tau, p, q, qp, r).map_err(|e| e.to_string()),
            (None, None, None, None) => {
                feasibility::find_feasible(self.tau).ok_or_else(|| format!("no feasible tuple for tau {}", self.tau))
            }
            _ => Err("give all of --p --q --qprime --r or none".into()),
        }
    }
}

#[derive(Subcommand)]
enum TsuboiOp {
    /// Builds the action and writes the per-block CSV.
    Build {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "N", default_value_t = 8)]
        n: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Runs the structural and regularity checks.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "N", default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long = "points-per-block", default_value_t = 16)]
        points_per_block: usize,
    },
}

#[derive(Subcommand)]
enum FeasOp {
    Check {
        #[command(flatten)]
        params: ParamArgs,
    },
    Find {
        #[arg(long)]
        tau: f64,
    },
    SupTau {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    Region {
        /// Number of interior τ grid points in (0,1).
        #[arg(long, default_value_t = 99)]
        taus: usize,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum NestOp {
    Verify {
        #[arg(long)]
        file: String,
        #[arg(long = "n-max", default_value_t = 32)]
        n_max: usize,
        #[arg(long = "tail-tol", default_value_t = 1e-3)]
        tail_tol: f64,
        /// Also reports the contradiction quantities at this exponent.
        #[arg(long = "knest-tau")]
        knest_tau: Option<f64>,
        #[arg(long)]
        csv: Option<String>,
    },
    /// Emits the translation example witness.
    Example {
        #[arg(long, default_value_t = 12)]
        copies: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightChoice {
    Test,
    Harmonic,
    Geometric,
    Zero,
}

#[derive(Subcommand)]
enum StochOp {
    Omega {
        #[arg(long, value_enum, default_value = "test")]
        weight: WeightChoice,
        /// Alphabet size; the test weight uses 2.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long = "n-max", default_value_t = 200)]
        n_max: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<String>,
    },
    Ping {
        /// Action file holding `g1` and `g2`; the built-in example otherwise.
        #[arg(long)]
        file: Option<String>,
        #[arg(long, default_value = "g1")]
        g1: String,
        #[arg(long, default_value = "g2")]
        g2: String,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        u0: Option<Vec<String>>,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long, default_value_t = 6)]
        words: usize,
        #[arg(long = "n-max", default_value_t = 200)]
        n_max: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

type Out = Result<String, String>;

fn read(path: &str) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

fn write(path: &str, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{path}: {e}"))
}

fn load_action(path: &str) -> Result<ActionFile, String> {
    ActionFile::parse(&read(path)?).map_err(|e| format!("{path}: {e}"))
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn interval_arg(v: &[String]) -> Result<(Rational, Rational), String> {
    Ok((rational(&v[0])?, rational(&v[1])?))
}

fn resolve(t: &Target) -> Result<(String, PLHomeo), String> {
    let a = load_action(&t.file)?;
    let word = match (&t.gen, &t.word) {
        (Some(g), None) => GroupWord::generator(g),
        (None, Some(w)) => GroupWord::parse(w).map_err(|e| e.to_string())?,
        _ => return Err("give exactly one of --gen and --word".into()),
    };
    let map = word.evaluate(&a.generators).map_err(|e| e.to_string())?;
    Ok((word.to_string(), map))
}

fn points(map: &PLHomeo) -> String {
    map.breakpoints()
        .iter()
        .map(|(x, y)| format!("{}:{}", fmt_rational(x), fmt_rational(y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn pl(op: PlOp) -> Out {
    Ok(match op {
        PlOp::Compose(t) => {
            let (w, m) = resolve(&t)?;
            format!("word: {w}\nbreakpoints: {}\n", points(&m))
        }
        PlOp::Invert(t) => {
            let (w, m) = resolve(&t)?;
            format!("word: ({w})^-1\nbreakpoints: {}\n", points(&m.inverse()))
        }
        PlOp::Evaluate { target, x } => {
            let (_, m) = resolve(&target)?;
            format!("{}\n", fmt_rational(&m.eval(&rational(&x)?).map_err(|e| e.to_string())?))
        }
        PlOp::Support(t) => {
            let (w, m) = resolve(&t)?;
            let comps = m.support_components();
            let mut s = format!("word: {w}\ncomponents: {}\n", comps.len());
            for j in comps {
                s.push_str(&format!("component: {j}\n"));
            }
            s
        }
        PlOp::Normalize { file } => load_action(&file)?.to_text(),
    })
}

fn spec(a: &ActionArgs) -> Result<ActionSpec, String> {
    let f = load_action(&a.file)?;
    ActionSpec::new(f.generators, a.budget.unwrap_or(f.budget)).map_err(|e| e.to_string())
}

fn central(c: &CentralArgs) -> Result<(ActionSpec, PLHomeo, Option<(Rational, Rational)>), String> {
    let f = load_action(&c.action.file)?;
    let mut gens: GenSet = f.generators;
    let cmap = gens.remove(&c.centralizer).ok_or_else(|| format!("no generator {:?} in file", c.centralizer))?;
    let action = ActionSpec::new(gens, c.action.budget.unwrap_or(f.budget)).map_err(|e| e.to_string())?;
    let window = c.window.as_deref().map(interval_arg).transpose()?;
    Ok((action, cmap, window))
}

fn dynamics_cmd(op: DynOp) -> Out {
    Ok(match op {
        DynOp::TwoChain(a) => {
            let s = spec(&a)?;
            match dynamics::find_two_chain(&s) {
                Some(c) => format!("two-chain: found\nJ1: {}\ng1: {}\nJ2: {}\ng2: {}\n", c.j1, c.g1, c.j2, c.g2),
                None => format!("two-chain: none up to budget {}\n", s.word_budget()),
            }
        }
        DynOp::CrossedPair(a) => {
            let s = spec(&a)?;
            match dynamics::find_crossed_pair(&s) {
                Some(w) => format!("crossed-pair: found\n{w}\n"),
                None => format!("crossed-pair: none up to budget {}\n", s.word_budget()),
            }
        }
        DynOp::Conradian(a) => format!("conradian: {}\n", dynamics::conradian_diagnostic(&spec(&a)?)),
        DynOp::Classify(a) => {
            let c = dynamics::classify_supports(&spec(&a)?);
            let mut s = String::new();
            for (j, w) in &c.nested {
                s.push_str(&format!("nested: {j} via [{w}]\n"));
            }
            for (j, cover) in c.crossed_candidates.iter().zip(&c.coverings) {
                s.push_str(&format!("crossed-candidate: {j} covered by {} two-chains\n", cover.len()));
                for ch in cover {
                    s.push_str(&format!("  {ch}\n"));
                }
            }
            s
        }
        DynOp::CentralizerObstruction(c) => {
            let (action, cmap, window) = central(&c)?;
            match dynamics::centralizer_obstruction(&cmap, &action, window).map_err(|e| e.to_string())? {
                Some(cert) => format!("obstruction: found\nc-component: {}\n{}\n", cert.c_component, cert.chain),
                None => format!("obstruction: none up to budget {}\n", action.word_budget()),
            }
        }
        DynOp::ExtractNesting { central: c, k, horizon, out } => {
            let (action, cmap, window) = central(&c)?;
            match dynamics::extract_nesting_witness(&action, k, &cmap, window, horizon).map_err(|e| e.to_string())? {
                Some(w) => {
                    let text = WitnessFile { name: "extracted".into(), witness: w }.to_text().expect("PL witness");
                    if let Some(path) = out {
                        write(&path, &text)?;
                    }
                    format!("nesting: found\n{text}")
                }
                None => format!("nesting: none up to budget {}\n", action.word_budget()),
            }
        }
        DynOp::FCheck { budget } => {
            let r = dynamics::f_disjoint_commutators_check(budget);
            let hull = |h: &Option<Interval>| h.as_ref().map_or("none".into(), |j| j.to_string());
            format!(
                "budget: {}\nminus-commutators: {}\nplus-commutators: {}\nminus-hull: {}\nplus-hull: {}\nminus-inside: {}\nplus-inside: {}\ndisjoint: {}\npassed: {}\n",
                r.budget,
                r.minus_commutators,
                r.plus_commutators,
                hull(&r.minus_hull),
                hull(&r.plus_hull),
                r.minus_inside,
                r.plus_inside,
                r.disjoint,
                r.passed()
            )
        }
        DynOp::Model { seed, from, to, budget } => {
            let c = dynamics::translation_like();
            let base = match seed {
                ModelSeed::Tower => dynamics::tower_seed(),
                ModelSeed::F => dynamics::f_seed(),
            };
            let (mut gens, window) = dynamics::periodic_model(&base, &c, from..=to);
            gens.insert("c".into(), c);
            let name = match seed {
                ModelSeed::Tower => "tower",
                ModelSeed::F => "f",
            };
            let text = ActionFile { name: format!("{name}-model"), budget, generators: gens }.to_text();
            format!("# window {} {}\n{text}", fmt_rational(&window.0), fmt_rational(&window.1))
        }
    })
}

fn residual_lines(params: &Params) -> String {
    let r = feasibility::check_conditions(params);
    let mut s = format!("params: {params}\n");
    for (name, slack, strict) in r.entries() {
        let ok = if strict { slack > 0.0 } else { slack >= 0.0 };
        s.push_str(&format!("{name}: {} {}\n", fmt_real(slack), if ok { "ok" } else { "violated" }));
    }
    s.push_str(&format!("feasible: {}\n", r.feasible()));
    s
}

fn tsuboi_cmd(op: TsuboiOp) -> Out {
    Ok(match op {
        TsuboiOp::Build { params, n, out } => {
            let p = params.params()?;
            let act = tsuboi::build_action(&p, n).map_err(|e| e.to_string())?;
            let csv = act.to_csv();
            let head = format!(
                "params: {p}\nN: {n}\nblocks: {}\nend-gap-mass: {}\n",
                act.structure().blocks().count(),
                fmt_real(act.structure().gap_mass())
            );
            match out {
                Some(path) => {
                    write(&path, &csv)?;
                    head
                }
                None => head + &csv,
            }
        }
        TsuboiOp::Verify { params, n, samples, points_per_block } => {
            let p = params.params()?;
            let act = tsuboi::build_action(&p, n).map_err(|e| e.to_string())?;
            let c = tsuboi::verify_commutations(&act, samples);
            let j = tsuboi::junction_report(&act);
            let l = tsuboi::check_log_deriv_lipschitz(&act, 1.0);
            let ns = tsuboi::nested_support_report(&act);
            let disp = tsuboi::displacement_check(&act, p.tau, points_per_block, 2).map_err(|e| e.to_string())?;
            let h = tsuboi::derivative_holder(&act, p.tau, points_per_block, 2).map_err(|e| e.to_string())?;
            let mut s = format!("params: {p}\nN: {n}\nsample-points: {}\n", c.points);
            s.push_str(&format!("dev-[a,t]: {}\ndev-[b,t]: {}\n", fmt_real(c.at), fmt_real(c.bt)));
            for (m, d) in &c.lamp {
                s.push_str(&format!("dev-lamp-{m}: {}\n", fmt_real(*d)));
            }
            s.push_str(&format!(
                "junctions: {}\njunction-mismatch: {}\nidentity-mismatch: {}\nprescription-error: {}\n",
                j.junctions,
                fmt_real(j.max_mismatch),
                fmt_real(j.max_identity_mismatch),
                fmt_real(j.max_prescription_error)
            ));
            s.push_str(&format!("lipschitz-blocks: {}\nempirical-M: {}\n", l.blocks_checked, fmt_real(l.empirical_m)));
            s.push_str(&format!("nested-supports: {}\n", ns.passed()));
            let worst = disp.iter().map(|d| d.worst_ratio).fold(0.0, f64::max);
            let violations: usize = disp.iter().map(|d| d.violations).sum();
            s.push_str(&format!(
                "displacement-columns: {}\ndisplacement-worst-ratio: {}\ndisplacement-violations: {violations}\n",
                disp.len(),
                fmt_real(worst)
            ));
            s.push_str(&format!("holder-Da: {}\nholder-Dt: {}\n", fmt_real(h.da.value), fmt_real(h.dt.value)));
            let w = tsuboi::tsuboi_nesting_witness(&act, p.tau).map_err(|e| e.to_string())?;
            let failure = regularity::check_condition_ii(&w, n.saturating_sub(1)).map_err(|e| e.to_string())?;
            s.push_str(&format!(
                "nesting-condition-ii: {}\n",
                failure.map_or_else(|| format!("ok up to n={}", n.saturating_sub(1)), |f| f.to_string())
            ));
            s
        }
    })
}

fn feasibility_cmd(op: FeasOp) -> Out {
    Ok(match op {
        FeasOp::Check { params } => {
            let (Some(p), Some(q), Some(qp), Some(r)) = (params.p, params.q, params.qprime, params.r) else {
                return Err("check needs --p --q --qprime --r".into());
            };
            residual_lines(&Params::new(params.tau, p, q, qp, r).map_err(|e| e.to_string())?)
        }
        FeasOp::Find { tau } => match feasibility::find_feasible(tau) {
            Some(p) => residual_lines(&p),
            None => format!("feasible: none found for tau {}\n", fmt_real(tau)),
        },
        FeasOp::SupTau { tol } => {
            if !(tol > 0.0) {
                return Err("--tol must be positive".into());
            }
            format!(
                "sup-tau: {}\ngolden-threshold: {}\n",
                fmt_real(feasibility::sup_tau(tol)),
                fmt_real(feasibility::golden_threshold())
            )
        }
        FeasOp::Region { taus, out } => {
            let tau_grid: Vec<f64> = (1..=taus).map(|i| i as f64 / (taus + 1) as f64).collect();
            let csv = feasibility::region_csv(&feasibility::emit_region(&tau_grid, &feasibility::q_grid()));
            match out {
                Some(path) => {
                    write(&path, &csv)?;
                    format!("rows: {}\n", csv.lines().count() - 1)
                }
                None => csv,
            }
        }
    })
}

fn nesting_cmd(op: NestOp) -> Out {
    Ok(match op {
        NestOp::Verify { file, n_max, tail_tol, knest_tau, csv } => {
            let wf = WitnessFile::parse(&read(&file)?).map_err(|e| format!("{file}: {e}"))?;
            let w = &wf.witness;
            let r = regularity::verify_nesting_witness(w, n_max, tail_tol).map_err(|e| e.to_string())?;
            let mut s = format!(
                "witness: {}\nk: {}\nu: {}\nn-max: {n_max}\nexact: {}\n",
                wf.name,
                w.k(),
                fmt_real(w.u()),
                r.exact
            );
            s.push_str(&format!(
                "condition-ii: {}\n",
                r.failure.as_ref().map_or_else(|| "ok".to_string(), |f| format!("failed {f}"))
            ));
            s.push_str(&format!("partial-sum: {}\n", fmt_real(r.partial_sum())));
            s.push_str(&format!("tail-ratio: {}\n", r.tail_ratio.map_or("none".into(), fmt_real)));
            s.push_str(&format!("tail-bound: {}\n", r.tail_bound.map_or("none".into(), fmt_real)));
            s.push_str(&format!("accepted: {}\n", r.accepted()));
            if let Some(tau) = knest_tau {
                let k = regularity::knest_contradiction_quantities(w, tau, n_max, 2048).map_err(|e| e.to_string())?;
                s.push_str(&format!(
                    "knest-N: {}\nknest-Nbar: {}\nknest-lemma-applies: {}\nknest-visible-at: {}\nknest-forced-at: {}\n",
                    fmt_real(k.big_n),
                    fmt_real(k.big_n_bar),
                    k.lemma_applies,
                    k.visible_at.map_or("none".into(), |n| n.to_string()),
                    k.forced_at.map_or("none".into(), |n| n.to_string())
                ));
            }
            if let Some(path) = csv {
                write(&path, &r.to_csv())?;
            }
            s
        }
        NestOp::Example { copies } => {
            if copies < 1 {
                return Err("--copies must be at least 1".into());
            }
            WitnessFile { name: "translation".into(), witness: dynamics::translation_example_witness(copies) }
                .to_text()
                .expect("PL witness")
        }
    })
}

fn stochastic_cmd(op: StochOp) -> Out {
    Ok(match op {
        StochOp::Omega { weight, d, tau, n_max, trials, seed, csv } => {
            let w = match weight {
                WeightChoice::Test => Ok(SeqWeight::test_weight()),
                WeightChoice::Harmonic => SeqWeight::harmonic(d),
                WeightChoice::Geometric => SeqWeight::geometric(d),
                WeightChoice::Zero => SeqWeight::zero(d),
            }
            .map_err(|e| e.to_string())?;
            let st = stochastic::omega_sum_monte_carlo(&w, tau, n_max, trials, seed).map_err(|e| e.to_string())?;
            let b = stochastic::expectation_bound(w.d(), tau, n_max).map_err(|e| e.to_string())?;
            if let Some(path) = csv {
                write(&path, &st.to_csv())?;
            }
            format!(
                "weight: {w:?}\ntrials: {}\nseed: {seed}\nmean: {}\nmax: {}\nstd-error: {}\nbound: {}\nbound-closed-form: {}\nwithin-bound: {}\n",
                st.trials(),
                fmt_real(st.mean),
                fmt_real(st.max),
                fmt_real(st.std_error),
                fmt_real(b.partial),
                fmt_real(b.closed_form),
                st.mean <= b.partial + 3.0 * st.std_error
            )
        }
        StochOp::Ping { file, g1, g2, u0, tau, words, n_max, trials, seed } => {
            let (m1, m2, u) = match file {
                Some(path) => {
                    let a = load_action(&path)?;
                    let get = |n: &str| a.generators.get(n).cloned().ok_or_else(|| format!("no generator {n:?}"));
                    let u0 = u0.ok_or("--u0 is required with --file")?;
                    let (lo, hi) = interval_arg(&u0)?;
                    (get(&g1)?, get(&g2)?, Interval::open(lo, hi).map_err(|e| e.to_string())?)
                }
                None => stochastic::ping_example(),
            };
            let r = stochastic::ping_orbit_sums(&m1, &m2, &u, tau, words, n_max, trials, seed)
                .map_err(|e| e.to_string())?;
            let b = stochastic::expectation_bound(2, tau, n_max).map_err(|e| e.to_string())?;
            let mut s = format!("u0: {u}\nwords-checked: {}\n", r.words_checked);
            s.push_str(&match &r.overlap {
                None => "disjoint: true\n".to_string(),
                Some((a, b)) => format!("disjoint: false\noverlap: [{a}] [{b}]\n"),
            });
            for (n, t) in r.level_totals.iter().enumerate() {
                s.push_str(&format!("level-total-{n}: {}\n", fmt_real(*t)));
            }
            s.push_str(&format!(
                "mean: {}\nstd-error: {}\nbound: {}\nu0-length: {}\n",
                fmt_real(r.stats.mean),
                fmt_real(r.stats.std_error),
                fmt_real(b.partial),
                fmt_real(to_f64(&u.length()))
            ));
            s
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Pl { op } => pl(op),
        Command::Dynamics { op } => dynamics_cmd(op),
        Command::Tsuboi { op } => tsuboi_cmd(op),
        Command::Feasibility { op } => feasibility_cmd(op),
        Command::Nesting { op } => nesting_cmd(op),
        Command::Stochastic { op } => stochastic_cmd(op),
    };
    match result {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
