use std::io::{ErrorKind, Write};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use recodekit::experiments::{
    falsify, format_records, stats, verify, Check, Claim, FalsifyOptions, OutputFormat, RunConfig,
    VerifyBounds,
};
use recodekit::multiexp::predicted_cost;
use recodekit::recoding::recode;
use recodekit::transducer::{
    double_naf_transducer, state_distribution, stationary_distribution, transition_matrix,
    RationalMatrix,
};
use recodekit::{
    multiexp, stack, wllc_recode, AdditiveGroup, CostCounter, JointExpansion, ModGroup,
    RecodingScheme,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "recodekit",
    version,
    about = "Signed-digit recodings and multi-exponentiation cost experiments"
)]
struct Cli {
    /// Seed for every randomized subcommand.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format: json (JSON Lines) or csv.
    #[arg(long, global = true, default_value = "json", value_parser = parse_format)]
    format: OutputFormat,
    /// Worker threads for sampling; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recode one or more integers and print the digit rows.
    Recode {
        #[arg(long, value_parser = parse_scheme)]
        scheme: RecodingScheme,
        /// An integer to recode; repeat for joint schemes.
        #[arg(long = "n", required = true, allow_hyphen_values = true, value_parser = parse_int)]
        n: Vec<BigInt>,
        /// Output width; the recoding length for wllc.
        #[arg(long)]
        length: Option<usize>,
    },
    /// Compute a product of powers and report operation counts.
    Multiexp {
        /// `modp:<prime>` or `intadd`.
        #[arg(long)]
        group: String,
        #[arg(long = "base", required = true, allow_hyphen_values = true, value_parser = parse_int)]
        base: Vec<BigInt>,
        #[arg(long = "n", required = true, value_parser = parse_int)]
        n: Vec<BigInt>,
        #[arg(long, default_value = "sjsf", value_parser = parse_scheme)]
        scheme: RecodingScheme,
    },
    /// Mean weights and operation counts over random or all exponent vectors.
    Stats {
        #[arg(long = "scheme", value_parser = parse_scheme, default_values_t = [RecodingScheme::Wllc])]
        schemes: Vec<RecodingScheme>,
        #[arg(long = "length", default_values_t = [256usize])]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        dimension: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Enumerate all 2^(dimension·length) vectors instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Run an exhaustive or randomized check; exits 1 on failure.
    Verify {
        #[arg(value_parser = parse_check)]
        check: Check,
        #[arg(long, default_value_t = 14)]
        max_len: usize,
        #[arg(long)]
        max_n: Option<i64>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 10_000)]
        pairs: u64,
    },
    /// Exact transition matrix and state distributions of the double NAF machine.
    Markov {
        /// Largest k for e1·P^k.
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Measure a published claim against exact or sampled values.
    Falsify {
        #[arg(value_parser = parse_claim)]
        claim: Claim,
        /// Base length (slope claims; default 256) or word length (bit-prob; default 4).
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: recodekit::Error| e.to_string())
}

fn parse_scheme(s: &str) -> Result<RecodingScheme, String> {
    s.parse().map_err(|e: recodekit::Error| e.to_string())
}

fn parse_check(s: &str) -> Result<Check, String> {
    s.parse().map_err(|e: recodekit::Error| e.to_string())
}

fn parse_claim(s: &str) -> Result<Claim, String> {
    s.parse().map_err(|e: recodekit::Error| e.to_string())
}

fn parse_int(s: &str) -> Result<BigInt, String> {
    BigInt::from_str(s).map_err(|_| format!("not an integer: {s}"))
}

macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {{
        $out.push_str(&format!($($arg)*));
        $out.push('\n');
    }};
}

enum Status {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout
        .write_all(out.as_bytes())
        .and_then(|()| stdout.flush())
    {
        if e.kind() != ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli, out: &mut String) -> anyhow::Result<Status> {
    let format = cli.format;
    match cli.command {
        Command::Recode { scheme, n, length } => recode_cmd(scheme, &n, length, format, out),
        Command::Multiexp {
            group,
            base,
            n,
            scheme,
        } => multiexp_cmd(&group, &base, &n, scheme, format, out),
        Command::Stats {
            schemes,
            lengths,
            dimension,
            samples,
            exhaustive,
        } => {
            let config = RunConfig {
                seed: cli.seed,
                samples,
                lengths,
                schemes,
                dimension,
                exhaustive,
                format,
                workers: cli.workers,
            };
            let records = stats(&config)?;
            for r in records.iter().filter(|r| r.resampled > 0) {
                eprintln!(
                    "note: {} all-zero exponent vectors redrawn for {} at length {}",
                    r.resampled, r.scheme, r.length
                );
            }
            out.push_str(&format_records(&records, format));
            Ok(Status::Ok)
        }
        Command::Verify {
            check,
            max_len,
            max_n,
            samples,
            pairs,
        } => {
            let bounds = VerifyBounds {
                max_len,
                max_n,
                samples,
                pairs,
                seed: cli.seed,
            };
            let report = verify(check, &bounds)?;
            out.push_str(&report.to_string());
            Ok(if report.passed() {
                Status::Ok
            } else {
                Status::Failed
            })
        }
        Command::Markov { steps } => markov_cmd(steps, format, out),
        Command::Falsify {
            claim,
            length,
            samples,
        } => {
            let length = length.unwrap_or(if claim == Claim::BitProb { 4 } else { 256 });
            let options = FalsifyOptions {
                config: RunConfig {
                    seed: cli.seed,
                    samples,
                    workers: cli.workers,
                    ..Default::default()
                },
                length,
            };
            out.push_str(&falsify(claim, &options)?.to_string());
            Ok(Status::Ok)
        }
    }
}

fn recode_cmd(
    scheme: RecodingScheme,
    n: &[BigInt],
    length: Option<usize>,
    format: OutputFormat,
    out: &mut String,
) -> anyhow::Result<Status> {
    let j = match (scheme, length) {
        (RecodingScheme::Wllc, Some(len)) => {
            let rows = n
                .iter()
                .map(|x| wllc_recode(x, len))
                .collect::<Result<Vec<_>, _>>()?;
            stack(&rows)?
        }
        (_, Some(len)) => {
            let j = recode(scheme, n)?;
            if j.len() > len {
                bail!(
                    "{scheme} expansion needs {} digits, more than --length {len}",
                    j.len()
                );
            }
            j.padded(len)
        }
        (_, None) => recode(scheme, n)?,
    };
    let rows: Vec<String> = j.rows().iter().map(ToString::to_string).collect();
    let values: Vec<String> = j.value().iter().map(ToString::to_string).collect();
    match format {
        OutputFormat::Json => emit!(
            out,
            "{}",
            json!({
                "scheme": scheme.name(),
                "rows": rows,
                "value": values,
                "length": j.len(),
                "weight": j.joint_weight(),
                "weight1": j.weight1(),
            })
        ),
        OutputFormat::Csv => {
            emit!(out, "scheme,rows,value,length,weight,weight1");
            emit!(
                out,
                "{scheme},{},{},{},{},{}",
                rows.join(" / "),
                values.join(" / "),
                j.len(),
                j.joint_weight(),
                j.weight1()
            );
        }
    }
    Ok(Status::Ok)
}

fn multiexp_cmd(
    group: &str,
    bases: &[BigInt],
    n: &[BigInt],
    scheme: RecodingScheme,
    format: OutputFormat,
    out: &mut String,
) -> anyhow::Result<Status> {
    let outcome = if let Some(p) = group.strip_prefix("modp:") {
        let p = BigUint::from_str(p).with_context(|| format!("bad modulus in {group}"))?;
        let g = ModGroup::new(p)?;
        let elements = bases
            .iter()
            .map(|b| {
                b.to_biguint()
                    .ok_or_else(|| anyhow::anyhow!("base {b} is not in the group"))
                    .and_then(|b| Ok(g.element(b)?))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let run = multiexp(&elements, n, scheme, &g)?;
        MultiExpOutcome::new(run.element.to_string(), run.cost, run.expansion)
    } else if group == "intadd" {
        let g = AdditiveGroup { rank: 1 };
        let elements: Vec<Vec<BigInt>> = bases.iter().map(|b| vec![b.clone()]).collect();
        let run = multiexp(&elements, n, scheme, &g)?;
        MultiExpOutcome::new(run.element[0].to_string(), run.cost, run.expansion)
    } else {
        bail!("unknown group {group}; expected modp:<prime> or intadd");
    };
    print_multiexp(scheme, &outcome, format, out);
    Ok(Status::Ok)
}

/// A group-independent view of a multi-exponentiation result.
struct MultiExpOutcome {
    element: String,
    cost: CostCounter,
    expansion: JointExpansion,
}

impl MultiExpOutcome {
    fn new(element: String, cost: CostCounter, expansion: JointExpansion) -> Self {
        MultiExpOutcome {
            element,
            cost,
            expansion,
        }
    }
}

fn print_multiexp(
    scheme: RecodingScheme,
    o: &MultiExpOutcome,
    format: OutputFormat,
    out: &mut String,
) {
    let c = &o.cost;
    debug_assert_eq!(
        predicted_cost(&o.expansion),
        (c.squarings, c.multiplications)
    );
    match format {
        OutputFormat::Json => emit!(
            out,
            "{}",
            json!({
                "scheme": scheme.name(),
                "element": o.element,
                "expansion": o.expansion.rows().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "squarings": c.squarings,
                "multiplications": c.multiplications,
                "precomputation_multiplications": c.precomp_multiplications,
                "inversions": c.inversions,
            })
        ),
        OutputFormat::Csv => {
            emit!(out, "scheme,element,squarings,multiplications,precomputation_multiplications,inversions");
            emit!(
                out,
                "{scheme},{},{},{},{},{}",
                o.element,
                c.squarings,
                c.multiplications,
                c.precomp_multiplications,
                c.inversions
            );
        }
    }
}

fn decimal(x: &BigRational) -> String {
    format!("{:.6}", x.to_f64().unwrap_or(f64::NAN))
}

fn markov_cmd(steps: usize, format: OutputFormat, out: &mut String) -> anyhow::Result<Status> {
    let t = double_naf_transducer();
    let p = transition_matrix(&t);
    let names: Vec<String> = (0..t.num_states())
        .map(|s| t.label(s).to_string())
        .collect();
    let pi = stationary_distribution(&p)?;
    let distributions: Vec<Vec<BigRational>> = (0..=steps)
        .map(|k| state_distribution(&p, k).probabilities)
        .collect();
    match format {
        OutputFormat::Json => {
            let cells = |row: &[BigRational]| {
                row.iter()
                    .map(|x| json!({"fraction": x.to_string(), "decimal": decimal(x)}))
                    .collect::<Vec<_>>()
            };
            let matrix: Vec<_> = (0..p.size()).map(|i| cells(p.row(i))).collect();
            let dists: Vec<_> = distributions
                .iter()
                .enumerate()
                .map(|(k, d)| json!({"k": k, "distribution": cells(d)}))
                .collect();
            emit!(out, "{}", json!({"states": names, "matrix": matrix}));
            for d in dists {
                emit!(out, "{d}");
            }
            emit!(out, "{}", json!({"stationary": cells(&pi.probabilities)}));
        }
        OutputFormat::Csv => {
            emit!(out, "quantity,k,from,to,fraction,decimal");
            print_matrix_csv(&p, &names, out);
            for (k, d) in distributions.iter().enumerate() {
                for (s, x) in d.iter().enumerate() {
                    emit!(out, "distribution,{k},,{},{x},{}", names[s], decimal(x));
                }
            }
            for (s, x) in pi.probabilities.iter().enumerate() {
                emit!(out, "stationary,,,{},{x},{}", names[s], decimal(x));
            }
        }
    }
    Ok(Status::Ok)
}

fn print_matrix_csv(p: &RationalMatrix, names: &[String], out: &mut String) {
    for i in 0..p.size() {
        for (j, x) in p.row(i).iter().enumerate() {
            emit!(
                out,
                "transition,,{},{},{x},{}",
                names[i],
                names[j],
                decimal(x)
            );
        }
    }
}
