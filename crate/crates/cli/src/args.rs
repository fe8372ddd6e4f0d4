use clap::{Args, Parser, Subcommand, ValueEnum};

use cartan_adelic::index_assembly::Delta7;
use cartan_adelic::matgroups::CartanKind;

#[derive(Parser, Debug)]
#[command(name = "cartan-adelic", version, about = "Finite GL2 group checks and certified adelic index bounds")]
pub struct Cli {
    /// Render output as an aligned table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a closed-form bound.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Build a Cartan-type subgroup of GL2(Z/p^n).
    Cartan(CartanArgs),
    /// Lie filtration of a generated subgroup.
    Lie(GroupArgs),
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Local predicates and inertia orders.
    Local(LocalArgs),
    /// Compose the adelic index bound for case A or B.
    Assemble(AssembleArgs),
    /// Look up a j-invariant in the table of known indices.
    Known {
        #[arg(long, allow_hyphen_values = true)]
        j: String,
    },
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
pub enum BoundCmd {
    /// Adelic index bound in terms of the stable Faltings height.
    Height {
        #[arg(long = "F", allow_hyphen_values = true)]
        f: f64,
        #[arg(long)]
        refined: bool,
    },
    /// Heights and Faltings height interval of a rational j.
    J {
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Adelic index bound in terms of a squarefree conductor.
    Conductor {
        #[arg(long = "N")]
        n: u64,
    },
    /// Bound on the largest non-surjective prime.
    Lambda {
        #[arg(long = "F", allow_hyphen_values = true)]
        f: f64,
        #[arg(long)]
        refined: bool,
    },
}

#[derive(Args, Debug)]
pub struct CartanArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = parse_kind)]
    pub kind: CartanKind,
    #[arg(long, group = "what")]
    pub order: bool,
    #[arg(long, group = "what")]
    pub index: bool,
    #[arg(long, group = "what")]
    pub elements: bool,
}

#[derive(Args, Debug)]
pub struct GroupArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    /// Generators as "a,b;c,d|a,b;c,d|...".
    #[arg(long, allow_hyphen_values = true)]
    pub gens: String,
}

#[derive(Subcommand, Debug)]
pub enum LiftCmd {
    /// A complement to the kernel of reduction mod p.
    Complement(GroupArgs),
    /// Roots of the characteristic polynomial lifted to Z/p^n.
    Eigen {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReductionArg {
    Ord,
    Ss,
}

#[derive(Args, Debug)]
pub struct LocalArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub e: u64,
    #[arg(long)]
    pub ell: Option<u64>,
    #[arg(long, value_enum)]
    pub reduction: Option<ReductionArg>,
    #[arg(long, default_value_t = 1)]
    pub eta: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

#[derive(Args, Debug)]
pub struct AssembleArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    #[arg(long)]
    pub lambda: String,
    #[arg(long, default_value_t = 0)]
    pub beta: u32,
    #[arg(long, value_parser = parse_delta7, default_value = "8/3")]
    pub delta7: Delta7,
    /// Also evaluate the absorbed form with 3^|C_ns| and compare.
    #[arg(long)]
    pub c_ns: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Certified Mertens-type inequality over a range and over primorials.
    Mertens {
        #[arg(long, default_value_t = 100_000)]
        max_n: u64,
        #[arg(long, default_value_t = 2263)]
        max_k: usize,
    },
    /// Classification census of Cartan lifts.
    CartanTower {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Enumerated index of the non-split Cartan normaliser against the closed form.
    CartanIndex {
        #[arg(long, requires = "n")]
        p: Option<u32>,
        #[arg(long, requires = "p")]
        n: Option<u32>,
    },
    /// Filtration, decomposition and containment checks.
    LieFiltration {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Every acceptance criterion.
    All {
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_kind(s: &str) -> Result<CartanKind, String> {
    s.parse().map_err(|e: cartan_adelic::Error| e.to_string())
}

fn parse_delta7(s: &str) -> Result<Delta7, String> {
    s.parse().map_err(|e: cartan_adelic::Error| e.to_string())
}
