//! Command-line surface: argument parsing, configuration, on-disk cache and
//! batch orchestration.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, prime_power};
use crate::classify::{
    check_all, check_lemma_c3c3k, check_lemma_c4c2, check_main15, check_radical_persistence,
    check_theorem_2odd, check_theorem_8p, predicted_schur, schur_group_verdict_from, sring_id,
    primary_parts, Report, Verdict,
};
use crate::constructions::{all_decompositions, decompose_basic_set};
use crate::enumeration::{enumerate_srings_bounded, EnumerationResult, DEFAULT_MAX_ENUMERATION_ORDER};
use crate::error::{Error, Result};
use crate::group::{abelian_groups_of_order, hall_complement, sylow_subgroup, AbelianGroup};
use crate::schurity::{is_schurian_bounded, DEFAULT_MAX_SCHEME_POINTS};
use crate::sring::{make_sring, SRing, SRingJson};

/// Bumped whenever cached enumeration output would change.
pub const CACHE_FORMAT_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

/// Resolved run configuration.
#[derive(Clone, Debug)]
pub struct Config {
    pub cache_dir: Option<PathBuf>,
    pub max_group_order: usize,
    pub max_aut_order: usize,
    pub max_scheme_order: usize,
    pub threads: usize,
    pub output_format: OutputFormat,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            cache_dir: None,
            max_group_order: DEFAULT_MAX_ENUMERATION_ORDER,
            max_aut_order: 1 << 20,
            max_scheme_order: DEFAULT_MAX_SCHEME_POINTS,
            threads: 0,
            output_format: OutputFormat::Json,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "schurkit", version, about = "Schur rings over finite abelian groups")]
struct Cli {
    /// Cache directory (overridden by SCHURKIT_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ENUMERATION_ORDER)]
    max_group_order: usize,
    #[arg(long, global = true, default_value_t = 1 << 20)]
    max_aut_order: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_SCHEME_POINTS)]
    max_scheme_order: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every S-ring over a group.
    Enumerate { group: String },
    /// Schurity certificates for every S-ring over a group, or for those in FILE.
    Schurity {
        group: String,
        #[arg(long)]
        sring: Option<PathBuf>,
    },
    /// Structural decompositions of the S-rings in FILE.
    Decompose {
        group: String,
        #[arg(long)]
        sring: PathBuf,
    },
    /// Run a verification suite: c4c2, e8, 8p:P, 2odd:k=N, 2odd:q=N, classification.
    Classify {
        suite: String,
        /// Skip the schurity part of the family suites.
        #[arg(long)]
        no_schurity: bool,
        /// Largest order covered by the classification suite.
        #[arg(long, default_value_t = 24)]
        max_order: u64,
    },
    /// Aggregate cached suite reports.
    Report,
}

/// Parses `4,2`, `C4xC2`, `E8`, `E9xC4`, `2x2x2`.
pub fn parse_group(text: &str) -> Result<AbelianGroup> {
    let text = text.trim();
    let bad = || Error::Parse(format!("cannot read group {text:?}"));
    let mut factors = Vec::new();
    for token in text.split([',', 'x', 'X', '*']).map(str::trim) {
        if token.is_empty() {
            return Err(bad());
        }
        let (elementary, digits) = match token.as_bytes()[0] {
            b'C' | b'c' | b'Z' => (false, &token[1..]),
            b'E' | b'e' => (true, &token[1..]),
            _ => (false, token),
        };
        let n: u32 = digits.parse().map_err(|_| bad())?;
        if elementary {
            let (p, k) = prime_power(n as u64).ok_or_else(bad)?;
            factors.extend(std::iter::repeat_n(p as u32, k as usize));
        } else {
            factors.push(n);
        }
    }
    AbelianGroup::new(&factors)
}

fn group_key(g: &AbelianGroup) -> String {
    let parts: Vec<String> = g.invariants().iter().map(|f| f.to_string()).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("x")
    }
}

#[derive(Serialize, Deserialize)]
struct CachedEnumeration {
    version: String,
    factors: Vec<u32>,
    srings: Vec<Vec<Vec<usize>>>,
    class_reps: Vec<Vec<Vec<usize>>>,
    dual_paired: Vec<usize>,
}

fn cache_version() -> String {
    format!("{}-{}", env!("CARGO_PKG_VERSION"), CACHE_FORMAT_VERSION)
}

/// Orchestrates library calls under one configuration.
pub struct Runner {
    config: Config,
}

impl Runner {
    pub fn new(config: Config) -> Runner {
        if let Some(dir) = &config.cache_dir {
            if fs::create_dir_all(dir).is_err() {
                log::warn!("cache directory {} is not writable; caching disabled", dir.display());
                return Runner {
                    config: Config {
                        cache_dir: None,
                        ..config
                    },
                };
            }
        }
        Runner { config }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    fn cache_path(&self, name: &str) -> Option<PathBuf> {
        self.config.cache_dir.as_ref().map(|d| d.join(name))
    }

    fn check_group(&self, g: &AbelianGroup) -> Result<()> {
        if g.order() > self.config.max_group_order {
            return Err(Error::BoundExceeded {
                what: "group order",
                actual: g.order(),
                limit: self.config.max_group_order,
            });
        }
        let aut = crate::aut::automorphism_group(g)?;
        if aut.order()? > self.config.max_aut_order {
            return Err(Error::BoundExceeded {
                what: "automorphism group order",
                actual: aut.order()?,
                limit: self.config.max_aut_order,
            });
        }
        Ok(())
    }

    /// Enumeration, read from or written to the cache when one is configured.
    pub fn enumerate(&self, g: &AbelianGroup) -> Result<EnumerationResult> {
        self.check_group(g)?;
        let path = self.cache_path(&format!("enumerate-{}.json", group_key(g)));
        if let Some(p) = &path {
            if let Some(hit) = self.load_enumeration(p, g)? {
                log::info!("cache hit {}", p.display());
                return Ok(hit);
            }
        }
        log::info!("enumerating {g}");
        let result = enumerate_srings_bounded(g, self.config.max_group_order)?;
        if let Some(p) = &path {
            let cached = CachedEnumeration {
                version: cache_version(),
                factors: g.factors().to_vec(),
                srings: result.srings.iter().map(|a| a.classes().to_vec()).collect(),
                class_reps: result.class_reps.iter().map(|a| a.classes().to_vec()).collect(),
                dual_paired: result.dual_paired.clone(),
            };
            write_atomic(p, &serde_json::to_vec(&cached)?)?;
        }
        Ok(result)
    }

    fn load_enumeration(&self, path: &Path, g: &AbelianGroup) -> Result<Option<EnumerationResult>> {
        let Ok(bytes) = fs::read(path) else {
            return Ok(None);
        };
        let Ok(cached) = serde_json::from_slice::<CachedEnumeration>(&bytes) else {
            log::warn!("ignoring unreadable cache file {}", path.display());
            return Ok(None);
        };
        if cached.version != cache_version() || cached.factors != g.factors() {
            return Ok(None);
        }
        let build = |list: Vec<Vec<Vec<usize>>>| -> Result<Vec<SRing>> {
            list.into_iter().map(|c| make_sring(g, c)).collect()
        };
        Ok(Some(EnumerationResult {
            group: g.clone(),
            srings: build(cached.srings)?,
            class_reps: build(cached.class_reps)?,
            dual_paired: cached.dual_paired,
        }))
    }

    fn save_report(&self, suite: &str, report: &Report) -> Result<()> {
        let name: String = suite
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        if let Some(p) = self.cache_path(&format!("report-{name}.json")) {
            write_atomic(&p, &serde_json::to_vec(report)?)?;
        }
        Ok(())
    }

    /// Runs every statement relevant to `g` on its nontrivial rings.
    fn family_suite(&self, report: &mut Report, g: &AbelianGroup, checks: &[Check], schurity: bool) -> Result<()> {
        let result = self.enumerate(g)?;
        let mut verdicts: Vec<Verdict> = Vec::new();
        for check in checks {
            log::info!("{g}: {}", check.name);
            verdicts.extend(check_all(&result, check.run)?);
        }
        report.add_group(g, result.srings.len(), result.class_reps.len(), &verdicts);
        if schurity {
            log::info!("{g}: schurity");
            report.schurity.push(schur_group_verdict_from(&result)?);
        }
        Ok(())
    }

    /// Runs a named suite.
    pub fn classify(&self, suite: &str, schurity: bool, max_order: u64) -> Result<Report> {
        let mut report = Report::new();
        let (name, arg) = suite.split_once(':').unwrap_or((suite, ""));
        match (name, arg) {
            ("c4c2", "") => report.buckets.push(check_lemma_c4c2(&AbelianGroup::new(&[4, 2])?)?),
            ("e8", "") => report.buckets.push(check_lemma_c4c2(&AbelianGroup::new(&[2, 2, 2])?)?),
            ("8p", p) => {
                let p: u32 = p.parse().map_err(|_| Error::Parse(format!("bad prime in {suite:?}")))?;
                if p == 2 || !is_prime(p as u64) {
                    return Err(Error::Parse(format!("{p} is not an odd prime")));
                }
                let checks = [MAIN15, THEOREM_8P];
                for g in [AbelianGroup::new(&[4, 2 * p])?, AbelianGroup::new(&[2, 2, 2, p])?] {
                    self.family_suite(&mut report, &g, &checks, schurity)?;
                }
            }
            ("2odd", spec) => {
                let (kind, n) = spec.split_once('=').unwrap_or(("k", spec));
                let n: u32 = n.parse().map_err(|_| Error::Parse(format!("bad parameter in {suite:?}")))?;
                match kind {
                    "k" if n >= 1 => {
                        let big = 3u32.pow(n);
                        let checks = [MAIN15, THEOREM_2ODD];
                        self.family_suite(&mut report, &AbelianGroup::new(&[6, big])?, &checks, schurity)?;
                        if n >= 2 {
                            let checks = [LEMMA_C3C3K, RADICAL_PERSISTENCE];
                            self.family_suite(&mut report, &AbelianGroup::new(&[3, big])?, &checks, schurity)?;
                        }
                    }
                    "q" if is_prime(n as u64) => {
                        let checks = [MAIN15, THEOREM_2ODD];
                        let g = AbelianGroup::new(&[3, 3, 2 * n])?;
                        self.family_suite(&mut report, &g, &checks, schurity)?;
                    }
                    _ => return Err(Error::Parse(format!("bad parameter in {suite:?}"))),
                }
            }
            ("classification", "") => {
                for n in 2..=max_order.min(self.config.max_group_order as u64) {
                    for g in abelian_groups_of_order(n)? {
                        let result = self.enumerate(&g)?;
                        log::info!("{g}: schurity over {} rings", result.srings.len());
                        report.schurity.push(schur_group_verdict_from(&result)?);
                    }
                }
            }
            _ => return Err(Error::Parse(format!("unknown suite {suite:?}"))),
        }
        self.save_report(suite, &report)?;
        Ok(report)
    }

    /// All cached suite reports, merged in file-name order.
    pub fn aggregate(&self) -> Result<Report> {
        let dir = self
            .config
            .cache_dir
            .as_ref()
            .ok_or_else(|| Error::Parse("report needs a cache directory (--cache-dir or SCHURKIT_CACHE)".into()))?;
        let mut names: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("report-") && n.ends_with(".json"))
            })
            .collect();
        names.sort();
        let mut report = Report::new();
        for p in names {
            let part: Report = serde_json::from_slice(&fs::read(&p)?)?;
            report.merge(part);
        }
        Ok(report)
    }

    pub fn schurity(&self, g: &AbelianGroup, file: Option<&Path>) -> Result<(String, bool)> {
        let rings = match file {
            Some(f) => read_srings(f, g)?,
            None => self.enumerate(g)?.srings,
        };
        let max = self.config.max_scheme_order;
        let certs = {
            use rayon::prelude::*;
            rings
                .par_iter()
                .map(|a| Ok((sring_id(a)?, is_schurian_bounded(a, max)?)))
                .collect::<Result<Vec<_>>>()?
        };
        let all_schurian = certs.iter().all(|(_, c)| c.schurian);
        // a non-schurian ring over a listed Schur group contradicts the classification
        let violation = !all_schurian && predicted_schur(g) == Some(true);
        let out = match self.config.output_format {
            OutputFormat::Json => {
                let items: Vec<serde_json::Value> = rings
                    .iter()
                    .zip(&certs)
                    .map(|(a, (id, c))| {
                        serde_json::json!({
                            "sring_id": id,
                            "sring": a.to_json(),
                            "certificate": c.to_json(),
                        })
                    })
                    .collect();
                serde_json::to_string_pretty(&items)? + "\n"
            }
            OutputFormat::Csv => {
                let mut s = String::from("sring_id,rank,schurian,aut_order,witness_class\n");
                for (a, (id, c)) in rings.iter().zip(&certs) {
                    let w = c.witness.map(|w| w.to_string()).unwrap_or_default();
                    s += &format!("{id},{},{},{},{w}\n", a.rank(), c.schurian, c.aut_order);
                }
                s
            }
            OutputFormat::Text => {
                let bad = certs.iter().filter(|(_, c)| !c.schurian).count();
                let mut s = format!("{g}: {} S-rings, {bad} non-schurian\n", rings.len());
                for (a, (_, c)) in rings.iter().zip(&certs).filter(|(_, (_, c))| !c.schurian) {
                    let w = c.witness.expect("non-schurian certificates carry a witness");
                    s += &format!("  non-schurian: {:?}, class {:?} splits\n", a.classes(), a.class(w));
                }
                s
            }
        };
        Ok((out, violation))
    }

    pub fn decompose(&self, g: &AbelianGroup, file: &Path) -> Result<String> {
        let rings = read_srings(file, g)?;
        let mut items = Vec::new();
        for a in &rings {
            items.push(serde_json::json!({
                "sring_id": sring_id(a)?,
                "rank": a.rank(),
                "decompositions": all_decompositions(a)?,
                "dense": dense_decompositions(a)?,
            }));
        }
        Ok(match self.config.output_format {
            OutputFormat::Json => serde_json::to_string_pretty(&items)? + "\n",
            _ => {
                let mut s = String::new();
                for it in &items {
                    let kinds: Vec<&str> = it["decompositions"]
                        .as_array()
                        .into_iter()
                        .flatten()
                        .filter_map(|d| d["kind"].as_str())
                        .collect();
                    s += &format!("{} rank {}: {}\n", it["sring_id"].as_str().unwrap_or(""), it["rank"], kinds.join(" "));
                }
                s
            }
        })
    }

    pub fn enumerate_output(&self, g: &AbelianGroup) -> Result<String> {
        let result = self.enumerate(g)?;
        Ok(match self.config.output_format {
            OutputFormat::Json => {
                let items: Vec<SRingJson> = result.srings.iter().map(SRing::to_json).collect();
                serde_json::to_string_pretty(&items)? + "\n"
            }
            OutputFormat::Csv => {
                let mut s = String::from("index,rank,cayley_class,classes\n");
                for (i, a) in result.srings.iter().enumerate() {
                    let classes: Vec<String> = a
                        .classes()
                        .iter()
                        .map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                        .collect();
                    s += &format!("{i},{},{},{}\n", a.rank(), result.rep_index(a)?, classes.join("|"));
                }
                s
            }
            OutputFormat::Text => format!(
                "{g}: {} S-rings, {} up to Cayley isomorphism\n",
                result.srings.len(),
                result.class_reps.len()
            ),
        })
    }
}

/// Dense splittings of every basic set avoiding `H` and `P`, for each prime-order Sylow `P`.
fn dense_decompositions(a: &SRing) -> Result<Vec<serde_json::Value>> {
    let g = a.group();
    let mut out = Vec::new();
    for (p, exps) in primary_parts(g) {
        if exps != [1] || primary_parts(g).len() < 2 {
            continue;
        }
        let pp = sylow_subgroup(g, p as u32);
        let h = hall_complement(g, p as u32);
        if !a.is_dense(&h, &pp)? {
            continue;
        }
        for x in 0..a.rank() {
            if a.class(x).iter().any(|&z| h.contains(z) || pp.contains(z)) {
                continue;
            }
            let d = decompose_basic_set(a, &h, &pp, x)?;
            out.push(serde_json::json!({
                "prime": p,
                "class": x,
                "x_h": d.x_h,
                "x_p": d.x_p,
                "blocks_h": d.blocks_h,
                "blocks_p": d.blocks_p,
                "block_size": d.block_size(),
                "k_p_order": d.k_p.order()?,
                "quotient_order": d.quotient_order()?,
            }));
        }
    }
    Ok(out)
}

/// One S-ring object or an array of them; each must live over `g`.
pub fn read_srings(path: &Path, g: &AbelianGroup) -> Result<Vec<SRing>> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let items = match value {
        serde_json::Value::Array(v) => v,
        other => vec![other],
    };
    let mut out = Vec::new();
    for item in items {
        let j: SRingJson = serde_json::from_value(item)?;
        let a = j.into_sring()?;
        if !a.group().is_isomorphic_to(g) || a.group().factors() != g.factors() {
            return Err(Error::WrongShape(format!("ring over {} given for {g}", a.group())));
        }
        out.push(a);
    }
    Ok(out)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Check {
    name: &'static str,
    run: fn(&SRing) -> Result<Verdict>,
}

const MAIN15: Check = Check { name: "main15", run: check_main15 };
const THEOREM_8P: Check = Check { name: "theorem_8p", run: check_theorem_8p };
const THEOREM_2ODD: Check = Check { name: "theorem_2odd", run: check_theorem_2odd };
const LEMMA_C3C3K: Check = Check { name: "lemma_c3c3k", run: check_lemma_c3c3k };
const RADICAL_PERSISTENCE: Check = Check {
    name: "radical_persistence",
    run: check_radical_persistence,
};

fn render_report(report: &Report, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Json => serde_json::to_string_pretty(&crate::classify::emit_report(report)?)? + "\n",
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Text => report.to_text(),
    })
}

/// Parses `argv`, runs the command, writes primary output to stdout and
/// returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = Config {
        cache_dir: std::env::var_os("SCHURKIT_CACHE").map(PathBuf::from).or(cli.cache_dir.clone()),
        max_group_order: cli.max_group_order,
        max_aut_order: cli.max_aut_order,
        max_scheme_order: cli.max_scheme_order,
        threads: cli.threads,
        output_format: cli.format,
    };
    if config.max_group_order == 0 || config.max_aut_order == 0 || config.max_scheme_order == 0 {
        eprintln!("error: bounds must be positive");
        return EXIT_USAGE;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let runner = Runner::new(config);
    match pool.install(|| execute(&runner, &cli.command)) {
        Ok((out, violation)) => {
            print!("{out}");
            if violation {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(runner: &Runner, command: &Command) -> Result<(String, bool)> {
    let format = runner.config().output_format;
    match command {
        Command::Enumerate { group } => Ok((runner.enumerate_output(&parse_group(group)?)?, false)),
        Command::Schurity { group, sring } => runner.schurity(&parse_group(group)?, sring.as_deref()),
        Command::Decompose { group, sring } => Ok((runner.decompose(&parse_group(group)?, sring)?, false)),
        Command::Classify {
            suite,
            no_schurity,
            max_order,
        } => {
            let report = runner.classify(suite, !no_schurity, *max_order)?;
            Ok((render_report(&report, format)?, !report.all_hold()))
        }
        Command::Report => {
            let report = runner.aggregate()?;
            Ok((render_report(&report, format)?, !report.all_hold()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_syntax() {
        let inv = |t: &str| parse_group(t).unwrap().invariants().to_vec();
        assert_eq!(inv("4,2"), vec![2, 4]);
        assert_eq!(inv("E8"), vec![2, 2, 2]);
        assert_eq!(inv("E9"), vec![3, 3]);
        assert_eq!(inv("C6xC9"), vec![3, 18]);
        assert_eq!(inv("E9xC4"), vec![3, 12]);
        assert_eq!(parse_group("4,2").unwrap().factors(), [4, 2]);
        assert!(parse_group("E6").is_err());
        assert!(parse_group("4,,2").is_err());
        assert!(parse_group("1").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["schurkit", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["schurkit", "classify", "nonsense"]), EXIT_USAGE);
        assert_eq!(run(["schurkit", "classify", "8p:4"]), EXIT_USAGE);
        assert_eq!(run(["schurkit", "enumerate", "100"]), EXIT_USAGE);
    }
}
