//! `ssg` — symbolic computation for self-similar groups presented by
//! Moore-diagram automata: nucleus, dangerous points, Hausdorff-cover
//! fibers, singular elements of Steinberg algebras, and simplicity reports.

use clap::{Parser, Subcommand};

use ssg_cli::commands::{self, CmdError};

#[derive(Parser)]
#[command(name = "ssg", version, about, long_about = None)]
struct Cli {
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the nucleus and a contraction certificate.
    Nucleus { file: String },
    /// Classify a point against TF of an element.
    Tf {
        file: String,
        element: String,
        point: String,
    },
    /// Decide whether a boundary point is dangerous.
    Dangerous { file: String, point: String },
    /// Enumerate the Hausdorff-cover fiber over a point.
    Fiber { file: String, point: String },
    /// Evaluate an algebra element at a germ.
    Eval {
        file: String,
        /// Element expression, e.g. `[|b||] + -1*[0|a|1|00,01]`.
        #[arg(long)]
        elem: String,
        /// Germ literal `g@point`, e.g. `b@(1)`.
        #[arg(long)]
        germ: String,
        /// Coefficient ring: 0 for Q, t >= 2 for Z/tZ.
        #[arg(long, default_value_t = 0)]
        t: u64,
    },
    /// Search for a condition-(S_t) witness and build the singular element.
    SingularSearch {
        file: String,
        /// Ring parameter: 0 for Q, t >= 2 for Z/tZ.
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        ball: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Simplicity report for fields of the given characteristic.
    Simplicity {
        file: String,
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
    },
    /// Decide whether the singular part of the Hausdorff cover has empty
    /// interior.
    D0 {
        file: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Search for a compact open set that is not regular open.
    RegularOpen {
        file: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Run the acceptance suite over the bundled corpus.
    Selftest {
        #[arg(long, default_value = "corpus")]
        corpus: String,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Nucleus { file } => commands::cmd_nucleus(file),
        Command::Tf {
            file,
            element,
            point,
        } => commands::cmd_tf(file, element, point),
        Command::Dangerous { file, point } => commands::cmd_dangerous(file, point),
        Command::Fiber { file, point } => commands::cmd_fiber(file, point),
        Command::Eval {
            file,
            elem,
            germ,
            t,
        } => commands::cmd_eval(file, elem, germ, *t),
        Command::SingularSearch {
            file,
            t,
            max_n,
            ball,
            depth,
        } => commands::cmd_singular_search(file, *t, *max_n, *ball, *depth),
        Command::Simplicity {
            file,
            characteristic,
        } => commands::cmd_simplicity(file, *characteristic),
        Command::D0 { file, depth } => commands::cmd_d0(file, *depth),
        Command::RegularOpen { file, depth } => commands::cmd_regular_open(file, *depth),
        Command::Selftest { corpus } => commands::cmd_selftest(corpus),
    };
    match result {
        Ok((report, code)) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
            } else {
                print!("{}", report.text);
            }
            std::process::exit(code);
        }
        Err(CmdError::Parse(msg)) => {
            eprintln!("error: {}", msg);
            std::process::exit(2);
        }
        Err(CmdError::Budget(msg)) => {
            eprintln!("budget exhausted: {}", msg);
            std::process::exit(3);
        }
    }
}
