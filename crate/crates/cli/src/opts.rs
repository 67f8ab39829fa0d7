use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use codicil::cluster::Backend;
use codicil::sampler::{Neighborhood, Retention, SimilarityKind};
use codicil::similarity::Normalizer;
use codicil::text::Scope;

#[derive(Debug, Parser)]
#[command(
    name = "codicil",
    version,
    about = "Content-aware graph simplification and clustering"
)]
pub struct Cli {
    /// Worker threads for the data-parallel stages.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Content edges, union, sampling, clustering (and evaluation) in one run.
    Pipeline(PipelineArgs),
    /// Re-execute a run from its manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Build the content edge set.
    ContentEdges(ContentEdgesArgs),
    /// Sample the union of topological and content edges.
    Sample(SampleArgs),
    /// Cluster a (sampled) graph.
    Cluster(ClusterArgs),
    /// Best-match F-score of a clustering against ground truth.
    Evaluate(EvaluateArgs),
    /// Component counts and Laplacian spectrum of a graph.
    Diagnose(DiagnoseArgs),
    /// Write a graph in the partitioner interchange format.
    ExportPartitioner {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a partitioner output file into a clustering file.
    ImportPartition {
        #[arg(long)]
        part: PathBuf,
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a planted-partition instance.
    Generate(GenerateArgs),
    /// Convert a LINQS `.content`/`.cites` pair into graph, terms and truth files.
    ImportLinqs {
        #[arg(long)]
        content: PathBuf,
        #[arg(long)]
        cites: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScopeArg {
    Full,
    #[value(name = "1hop")]
    OneHop,
    #[value(name = "2hop")]
    TwoHop,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::Full => Scope::Full,
            ScopeArg::OneHop => Scope::OneHop,
            ScopeArg::TwoHop => Scope::TwoHop,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SimArg {
    Cos,
    CosLsh,
    Jac,
    JacMh,
}

impl From<SimArg> for SimilarityKind {
    fn from(s: SimArg) -> Self {
        match s {
            SimArg::Cos => SimilarityKind::CosineExact,
            SimArg::CosLsh => SimilarityKind::CosineSimhash,
            SimArg::Jac => SimilarityKind::JaccardExact,
            SimArg::JacMh => SimilarityKind::JaccardMinhash,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    Zo,
    Z,
}

impl From<NormArg> for Normalizer {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Zo => Normalizer::ZeroOne,
            NormArg::Z => Normalizer::ZNorm,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Mcl,
    Lp,
    External,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Mcl => Backend::Mcl,
            BackendArg::Lp => Backend::Lp,
            BackendArg::External => Backend::External,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NeighborhoodArg {
    Open,
    Closed,
}

impl From<NeighborhoodArg> for Neighborhood {
    fn from(n: NeighborhoodArg) -> Self {
        match n {
            NeighborhoodArg::Open => Neighborhood::Open,
            NeighborhoodArg::Closed => Neighborhood::Closed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RetentionArg {
    Either,
    Both,
}

impl From<RetentionArg> for Retention {
    fn from(r: RetentionArg) -> Self {
        match r {
            RetentionArg::Either => Retention::Either,
            RetentionArg::Both => Retention::Both,
        }
    }
}

/// Content-edge construction flags.
#[derive(Debug, Clone, Args)]
pub struct ContentOpts {
    /// Content neighbors per vertex.
    #[arg(long, default_value_t = 50)]
    pub k: usize,
    /// Keep only the m heaviest TF-IDF entries of each vector.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "full")]
    pub scope: ScopeArg,
}

/// Sampling flags.
#[derive(Debug, Clone, Args)]
pub struct SampleOpts {
    #[arg(long, default_value = "0.5", value_parser = unit_interval)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "cos")]
    pub sim: SimArg,
    #[arg(long, value_enum, default_value = "zo")]
    pub norm: NormArg,
    /// MinHash functions.
    #[arg(long, default_value_t = 30)]
    pub hashes: usize,
    /// SimHash bits.
    #[arg(long, default_value_t = 512)]
    pub bits: usize,
    #[arg(long, value_enum, default_value = "closed")]
    pub neighborhood: NeighborhoodArg,
    #[arg(long, value_enum, default_value = "either")]
    pub retention: RetentionArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Clustering flags.
#[derive(Debug, Clone, Args)]
pub struct ClusterOpts {
    /// Requested cluster count (binding for the external partitioner only).
    #[arg(long, default_value_t = 6)]
    pub l: usize,
    #[arg(long, value_enum, default_value = "mcl")]
    pub backend: BackendArg,
    #[arg(long, default_value_t = 2.0)]
    pub inflation: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 100)]
    pub max_sweeps: usize,
    /// Partitioner program for `--backend external`, called as `<program> <graph> <l>`.
    #[arg(long, default_value = "gpmetis")]
    pub partitioner: String,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Term vectors; without them no content edges are built.
    #[arg(long)]
    pub terms: Option<PathBuf>,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[command(flatten)]
    pub content: ContentOpts,
    #[command(flatten)]
    pub sample: SampleOpts,
    #[command(flatten)]
    pub cluster: ClusterOpts,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ContentEdgesArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub terms: PathBuf,
    #[command(flatten)]
    pub content: ContentOpts,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub terms: Option<PathBuf>,
    /// Content edges from `content-edges`; omitted means none.
    #[arg(long)]
    pub content_edges: Option<PathBuf>,
    /// Only used to validate the config; content edges come from the file.
    #[arg(long, default_value_t = 50)]
    pub k: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub sample: SampleOpts,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub cluster: ClusterOpts,
    /// Root seed, as given to `pipeline`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Evaluate only on vertices that appear in some ground-truth cluster.
    #[arg(long)]
    pub truth_universe: bool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Also print this many smallest Laplacian eigenvalues.
    #[arg(long)]
    pub spectrum: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 2)]
    pub communities: usize,
    #[arg(long, default_value_t = 50)]
    pub size: usize,
    #[arg(long, default_value_t = 0.3)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.02)]
    pub p_out: f64,
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}
