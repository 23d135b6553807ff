use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};

use ccn_fib::dump::{parse_dump, prefix_length_histogram, profile, recommend, Requirements};
use ccn_fib::exit;
use ccn_fib::experiments::{run_bench, run_collisions, run_fpr, run_oracle};
use ccn_fib::tables::{sweep, Sweep, Table};
use ccn_fib::workload::InstanceParams;
use ccn_fib_core::Variant;

#[derive(Debug, Parser)]
#[command(name = "fib", version, about = "Memory-efficient CCN FIB evaluation")]
struct Cli {
    /// Seed for every randomized experiment.
    #[arg(long, global = true, env = "FIB_SEED", default_value_t = 1)]
    seed: u64,

    /// Write output here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit model sizes as CSV.
    Tables(TablesArgs),
    /// Measure a filter's false-positive rate.
    Fpr(FprArgs),
    /// Compare a FIB variant's lookups against the reference FIB.
    Oracle(OracleArgs),
    /// Profile a FIB dump and recommend a variant.
    Analyze(AnalyzeArgs),
    /// Time lookups over a seeded interest workload.
    Bench(BenchArgs),
    /// Estimate the 32-bit prefix hash false-match rate.
    Collisions(CollisionArgs),
}

#[derive(Debug, Args)]
struct TablesArgs {
    /// Emit one of the fixed table layouts (4 to 8).
    #[arg(long, value_parser = clap::value_parser!(u8).range(4..=8),
          conflicts_with_all = ["prefixes", "faces_min", "faces_max", "capacity", "prefix_bytes", "fpp"])]
    table: Option<u8>,
    /// Prefix counts to sweep.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [50u64, 60])]
    prefixes: Vec<u64>,
    #[arg(long, default_value_t = 10)]
    faces_min: u64,
    #[arg(long, default_value_t = 15)]
    faces_max: u64,
    /// Fixed filter capacity; ceil(N/F) when omitted.
    #[arg(long = "nbf")]
    capacity: Option<u64>,
    /// Encoded prefix length in bytes.
    #[arg(long = "prefix-bytes", default_value_t = 15)]
    prefix_bytes: u64,
    #[arg(long, default_value_t = 1e-6)]
    fpp: f64,
}

#[derive(Debug, Args)]
struct FprArgs {
    /// bf or cbf
    #[arg(long, default_value = "bf")]
    variant: Variant,
    #[arg(long = "nbf", default_value_t = 1000)]
    capacity: u64,
    #[arg(long, default_value_t = 0.01)]
    fpp: f64,
    /// Elements inserted before probing; defaults to the capacity.
    #[arg(long)]
    fill: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    probes: u64,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(long = "n", default_value_t = 50)]
    prefixes: usize,
    #[arg(long = "f", default_value_t = 10)]
    faces: usize,
    /// Maximum components per random prefix.
    #[arg(long, default_value_t = 6)]
    max_components: usize,
    /// Chance that a prefix gets a second face.
    #[arg(long, default_value_t = 0.0)]
    extra_face_prob: f64,
    #[arg(long, default_value_t = 1e-6)]
    fpp: f64,
}

impl InstanceArgs {
    fn params(&self) -> InstanceParams {
        InstanceParams {
            prefixes: self.prefixes,
            faces: self.faces,
            max_components: self.max_components,
            extra_face_prob: self.extra_face_prob,
            ..InstanceParams::default()
        }
    }
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// hash, bf or cbf
    #[arg(long, default_value = "hash")]
    variant: Variant,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[command(flatten)]
    instance: InstanceArgs,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    dump: PathBuf,
    /// Machine-readable output.
    #[arg(long)]
    csv: bool,
    /// Prefixes must be removable at runtime.
    #[arg(long)]
    removal: bool,
    #[arg(long, default_value_t = 5)]
    bin_width: usize,
    #[arg(long, default_value_t = 1e-6)]
    fpp: f64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// fib, hash, bf or cbf
    #[arg(long, default_value = "hash")]
    variant: Variant,
    #[arg(long, default_value_t = 1_000_000)]
    interests: u64,
    #[command(flatten)]
    instance: InstanceArgs,
}

#[derive(Debug, Args)]
struct CollisionArgs {
    #[arg(long, default_value_t = 1 << 16)]
    stored: u64,
    #[arg(long, default_value_t = 10_000_000)]
    probes: u64,
}

fn fail(msg: impl std::fmt::Display) -> ! {
    eprintln!("error: {msg}");
    process::exit(exit::USAGE);
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn analyze(args: &AnalyzeArgs) -> String {
    let text = fs::read_to_string(&args.dump)
        .unwrap_or_else(|e| fail(format_args!("{}: {e}", args.dump.display())));
    let mut dump =
        parse_dump(&text).unwrap_or_else(|e| fail(format_args!("{}: {e}", args.dump.display())));
    if dump.node_label.is_empty() {
        dump.node_label = args
            .dump
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    let p = profile(&dump);
    let hist = prefix_length_histogram(&dump, args.bin_width);
    let req = Requirements {
        removal: args.removal,
        fpp: args.fpp,
    };
    let rec = recommend(&p, &req);
    let w = args.bin_width.max(1);

    let mut out = String::new();
    if args.csv {
        let mut row = |section: &str, key: &str, value: String| {
            out += &format!("{section},{},{}\n", csv_field(key), csv_field(&value));
        };
        row("section", "key", "value".into());
        row("summary", "node", dump.node_label.clone());
        row("summary", "prefixes", p.prefixes.to_string());
        row("summary", "faces", p.faces.to_string());
        row(
            "summary",
            "mean_faces_per_prefix",
            format!("{:.3}", p.mean_faces_per_prefix),
        );
        row(
            "summary",
            "mean_prefixes_per_face",
            format!("{:.3}", p.mean_prefixes_per_face),
        );
        row("summary", "mapping", p.mapping.to_string());
        for (k, v) in &p.faces_per_prefix {
            row("faces_per_prefix", &k.to_string(), v.to_string());
        }
        for (k, v) in &p.prefixes_per_face {
            row("prefixes_per_face", &k.to_string(), v.to_string());
        }
        for (face, v) in p.per_face.iter().enumerate() {
            row("face_load", &(face + 1).to_string(), v.to_string());
        }
        for (k, v) in &hist {
            row("length_bin", &k.to_string(), v.to_string());
        }
        row("recommendation", "variant", rec.variant.to_string());
        row("recommendation", "rationale", rec.rationale);
    } else {
        out += &format!("node: {}\n", dump.node_label);
        out += &format!("prefixes (N): {}\n", p.prefixes);
        out += &format!("faces (F): {}\n", p.faces);
        out += &format!("mean faces per prefix: {:.2}\n", p.mean_faces_per_prefix);
        out += &format!(
            "mean prefixes per non-empty face: {:.2}\n",
            p.mean_prefixes_per_face
        );
        out += &format!("mapping: {}\n", p.mapping);
        out += "faces per prefix:\n";
        for (k, v) in &p.faces_per_prefix {
            out += &format!("  {k}: {v}\n");
        }
        out += "prefixes per face:\n";
        for (k, v) in &p.prefixes_per_face {
            out += &format!("  {k}: {v}\n");
        }
        out += &format!("prefix length histogram (bytes, bin {w}):\n");
        for (k, v) in &hist {
            out += &format!("  [{k}, {}): {v}\n", k + w);
        }
        out += &format!("recommendation: {}\n", rec.variant);
        out += &format!("rationale: {}\n", rec.rationale);
    }
    out
}

fn main() {
    let cli = Cli::parse();
    let mut code = exit::SUCCESS;

    let out = match &cli.command {
        Command::Tables(a) => {
            let csv = match a.table {
                Some(n) => Table::from_number(n).expect("range-checked").render(),
                None => sweep(&Sweep {
                    prefixes: a.prefixes.clone(),
                    faces: a.faces_min..=a.faces_max,
                    capacity: a.capacity,
                    prefix_bytes: a.prefix_bytes,
                    fpp: a.fpp,
                    ..Sweep::default()
                }),
            };
            csv.unwrap_or_else(|e| fail(e))
        }
        Command::Fpr(a) => {
            let fill = a.fill.unwrap_or(a.capacity);
            let r = run_fpr(a.variant, a.capacity, a.fpp, fill, a.probes, cli.seed)
                .unwrap_or_else(|e| fail(e));
            format!(
                "{}\n{}\n",
                ccn_fib::experiments::FprReport::CSV_HEADER,
                r.csv_row()
            )
        }
        Command::Oracle(a) => {
            let r = run_oracle(
                a.variant,
                a.instance.params(),
                a.instance.fpp,
                a.trials,
                cli.seed,
            )
            .unwrap_or_else(|e| fail(e));
            if r.counts.violations > 0 {
                code = exit::LAW_VIOLATION;
            }
            format!(
                "{}\n{}\n",
                ccn_fib::experiments::OracleReport::CSV_HEADER,
                r.csv_row()
            )
        }
        Command::Analyze(a) => analyze(a),
        Command::Bench(a) => {
            let r = run_bench(
                a.variant,
                a.instance.params(),
                a.instance.fpp,
                a.interests,
                cli.seed,
            )
            .unwrap_or_else(|e| fail(e));
            format!(
                "{}\n{}\n",
                ccn_fib::experiments::BenchReport::CSV_HEADER,
                r.csv_row()
            )
        }
        Command::Collisions(a) => {
            let r = run_collisions(a.stored, a.probes, cli.seed);
            format!(
                "{}\n{}\n",
                ccn_fib::experiments::CollisionReport::CSV_HEADER,
                r.csv_row()
            )
        }
    };

    let written = match &cli.output {
        Some(path) => fs::write(path, &out),
        None => io::stdout().lock().write_all(out.as_bytes()),
    };
    if let Err(e) = written {
        fail(e);
    }
    if code != exit::SUCCESS {
        eprintln!("error: oracle law violated");
    }
    process::exit(code);
}
