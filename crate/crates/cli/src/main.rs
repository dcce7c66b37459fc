mod render;

use clap::{Parser, Subcommand, ValueEnum};
use primelink::arith;
use primelink::iwasawa::{self, IwasawaParams, Sigma};
use primelink::linking::{linking_matrix, lk};
use primelink::mild::{find_circular_order, is_circular};
use primelink::padic::default_precision;
use primelink::presentation::{
    borromean_scan, koch_presentation, relations_mod_f4, AuxPlace, RamificationSet,
};
use primelink::quadfield::gold_test;
use primelink::redei::{mu2, redei_hypotheses, redei_symbol};
use primelink::Error;
use serde::Serialize;
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "primelink",
    version,
    about = "Linking numbers, Rédei symbols and Iwasawa modules of primes"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// p-adic precision N; defaults to the largest safe value for p.
    #[arg(long, env = "PRIMELINK_PRECISION", global = true)]
    precision: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Linking number lk(l, target) with respect to p.
    Lk {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        target: u64,
        #[arg(long)]
        p: u64,
    },
    /// Linking matrix of {p} ∪ S.
    Linkmatrix {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// Rédei symbol [a, b, i] and the Milnor number μ2(abi).
    Redei {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        primes: Vec<u64>,
    },
    /// Mod 2 Milnor numbers of {2} ∪ S and the relations modulo F_(4).
    Milnor {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// Koch presentation of the Galois group with restricted ramification.
    Koch {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        /// Auxiliary place: `inf`, a prime q ≡ 3 mod 4, or `none`.
        #[arg(long, default_value = "inf")]
        aux: String,
    },
    /// Search [lo, hi] for Borromean triples (2, a, b).
    Borromean {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Check or search for a circular ordering of {p} ∪ S.
    Circular {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long)]
        q: Option<u64>,
        /// Ordering of the indices 0..d; searched for when omitted.
        #[arg(long, value_delimiter = ',')]
        sigma: Option<Vec<usize>>,
    },
    /// Approximation of the initial Fitting ideal of the Iwasawa module of Q(√D).
    Iwasawa {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        /// `inf` or an auxiliary prime q.
        #[arg(long, default_value = "inf")]
        sigma: String,
        /// Coefficient bits M of Λ.
        #[arg(long)]
        lambda_bits: Option<u32>,
        /// Degree cap D of Λ.
        #[arg(long)]
        lambda_degree: Option<usize>,
    },
    /// Iwasawa polynomial of Q(√-ℓ1ℓ2) modulo (4T, 8).
    DeltaImag {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        primes: Vec<u64>,
    },
    /// Structure of the Iwasawa module of Q(√ℓ1ℓ2).
    DeltaReal {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        primes: Vec<u64>,
    },
    /// Gold criterion for Δ(T) = T over Q(√-d).
    Gold {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Lk { .. } => "lk",
            Command::Linkmatrix { .. } => "linkmatrix",
            Command::Redei { .. } => "redei",
            Command::Milnor { .. } => "milnor",
            Command::Koch { .. } => "koch",
            Command::Borromean { .. } => "borromean",
            Command::Circular { .. } => "circular",
            Command::Iwasawa { .. } => "iwasawa",
            Command::DeltaImag { .. } => "delta-imag",
            Command::DeltaReal { .. } => "delta-real",
            Command::Gold { .. } => "gold",
        }
    }
}

/// Parameters echoed with every result.
#[derive(Debug, Clone, Default, Serialize)]
struct Config {
    p: Option<u64>,
    precision: Option<u32>,
    lambda_bits: Option<u32>,
    lambda_degree: Option<usize>,
    primitive_root: &'static str,
}

fn exactly<const K: usize>(primes: &[u64]) -> primelink::Result<[u64; K]> {
    primes
        .try_into()
        .map_err(|_| Error::OutOfRange(format!("expected {K} primes, got {}", primes.len())))
}

fn precision_for(p: u64, given: Option<u32>) -> primelink::Result<u32> {
    if !arith::is_prime(p)? {
        return Err(Error::NotPrime(p));
    }
    Ok(given.unwrap_or_else(|| default_precision(p)))
}

fn parse_place(s: &str) -> primelink::Result<Option<u64>> {
    match s {
        "inf" | "infinity" | "∞" => Ok(None),
        _ => s
            .parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("expected `inf` or a prime, got `{s}`"))),
    }
}

fn to_value<T: Serialize>(v: &T) -> primelink::Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn run(cmd: &Command, precision: Option<u32>, cfg: &mut Config) -> primelink::Result<Value> {
    cfg.primitive_root = "smallest positive primitive root";
    match cmd {
        Command::Lk { l, target, p } => {
            let n = precision_for(*p, precision)?;
            cfg.p = Some(*p);
            cfg.precision = Some(n);
            let v = lk(*l, *target, *p, n)?;
            Ok(json!({
                "l": l,
                "target": target,
                "value": to_value(&v)?,
                "exponent": v.exponent().to_string(),
                "mod_p": v.reduce(*p),
            }))
        }
        Command::Linkmatrix { p, primes } => {
            let n = precision_for(*p, precision)?;
            cfg.p = Some(*p);
            cfg.precision = Some(n);
            let m = linking_matrix(primes, *p, n)?;
            Ok(json!({ "matrix": to_value(&m)?, "mod_p": m.reduced(*p) }))
        }
        Command::Redei { primes } => {
            let [a, b, i] = exactly::<3>(primes)?;
            cfg.p = Some(2);
            if !redei_hypotheses(a, b, i)? {
                return Err(Error::Hypothesis(format!(
                    "[{a}, {b}, {i}] needs the mod 2 linking numbers to vanish"
                )));
            }
            let s = redei_symbol(a, b, i)?;
            Ok(json!({ "a": a, "b": b, "i": i, "symbol": s, "mu2": mu2(a, b, i)? }))
        }
        Command::Milnor { p, primes } => {
            if *p != 2 {
                return Err(Error::NotImplemented(
                    "mod 2 Milnor numbers need p = 2".into(),
                ));
            }
            cfg.p = Some(2);
            let rels = relations_mod_f4(primes)?;
            let mut all = vec![2u64];
            all.extend_from_slice(primes);
            let mut table = Vec::new();
            for (a, &la) in all.iter().enumerate() {
                for (b, &lb) in all.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    for (i, &li) in all.iter().enumerate() {
                        table.push(json!({ "a": a, "b": b, "i": i, "mu2": mu2(la, lb, li)? }));
                    }
                }
            }
            let shown: Vec<String> = rels.iter().map(|r| r.to_string()).collect();
            Ok(json!({ "primes": all, "mu2": table, "relations": shown }))
        }
        Command::Koch { p, primes, aux } => {
            let n = precision_for(*p, precision)?;
            cfg.p = Some(*p);
            cfg.precision = Some(n);
            let aux = match aux.as_str() {
                "none" => AuxPlace::None,
                s => match parse_place(s)? {
                    None => AuxPlace::Infinity,
                    Some(q) => AuxPlace::Q(q),
                },
            };
            let k = koch_presentation(&RamificationSet::new(primes, aux), *p, n)?;
            to_value(&k)
        }
        Command::Borromean { lo, hi } => {
            cfg.p = Some(2);
            let found = borromean_scan(*lo, *hi)?;
            Ok(json!({ "lo": lo, "hi": hi, "count": found.len(), "triples": found }))
        }
        Command::Circular {
            p,
            primes,
            q,
            sigma,
        } => {
            cfg.p = Some(*p);
            let cert = match sigma {
                Some(s) => Some(is_circular(primes, *p, *q, s)?),
                None => find_circular_order(primes, *p, *q)?,
            };
            match cert {
                Some(c) => to_value(&c),
                None => Err(Error::Hypothesis(format!(
                    "no ordering of {primes:?} is circular for p = {p}"
                ))),
            }
        }
        Command::Iwasawa {
            primes,
            sigma,
            lambda_bits,
            lambda_degree,
        } => {
            let mut prm = match precision {
                Some(n) => IwasawaParams::for_precision(n)?,
                None => IwasawaParams::default(),
            };
            if let Some(b) = lambda_bits {
                prm.bits = *b;
            }
            if let Some(d) = lambda_degree {
                prm.degree = *d;
            }
            prm.validate()?;
            cfg.p = Some(2);
            cfg.precision = Some(prm.precision);
            cfg.lambda_bits = Some(prm.bits);
            cfg.lambda_degree = Some(prm.degree);
            let sigma = match parse_place(sigma)? {
                None => Sigma::Infinity,
                Some(q) => Sigma::Q(q),
            };
            let ap = iwasawa::fitting_approx_with(primes, sigma, &prm)?;
            let mut v = to_value(&ap)?;
            v["ideal"] = json!(ap.ideal_string());
            v["minors_display"] =
                json!(ap.minors.iter().map(|m| m.to_string()).collect::<Vec<_>>());
            Ok(v)
        }
        Command::DeltaImag { primes } => {
            let [l1, l2] = exactly::<2>(primes)?;
            cfg.p = Some(2);
            let dc = iwasawa::delta_imag(l1, l2)?;
            let mut v = to_value(&dc)?;
            v["delta"] = json!(dc.to_string());
            Ok(v)
        }
        Command::DeltaReal { primes } => {
            let [l1, l2] = exactly::<2>(primes)?;
            cfg.p = Some(2);
            to_value(&iwasawa::real_case(l1, l2)?)
        }
        Command::Gold { p, d } => {
            cfg.p = Some(*p);
            cfg.precision = Some(1);
            to_value(&gold_test(*p, *d)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = Config::default();
    let name = cli.command.name();
    let (body, code) = match run(&cli.command, cli.precision, &mut cfg) {
        Ok(v) => (json!({ "command": name, "config": cfg, "result": v }), 0),
        Err(e) => {
            let (kind, code) = if e.is_hypothesis() {
                ("hypothesis", 1)
            } else {
                ("malformed", 2)
            };
            let err = json!({ "kind": kind, "reason": e.to_string() });
            (
                json!({ "command": name, "config": cfg, "error": err }),
                code,
            )
        }
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&body).expect("values serialize"),
        Format::Table => render::table(&body),
    };
    if code < 2 {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    ExitCode::from(code)
}
