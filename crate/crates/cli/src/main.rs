mod opts;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use log::info;

use codicil::cluster::{
    export_partitioner_graph, import_partition, load_ground_truth, read_assignment,
    write_assignment, write_ground_truth, Backend, Clusterer, Clustering, ExternalPartitioner,
    LabelPropagation, Mcl,
};
use codicil::dataset::load_linqs;
use codicil::eval::{fscore_clustering, restrict};
use codicil::graph::{
    laplacian_spectrum, load_edge_list, write_edge_list, zero_multiplicity, LoadOptions,
    SpectrumOptions, ZERO_TOLERANCE,
};
use codicil::manifest::{EdgeCounts, Inputs, RunManifest};
use codicil::sampler::{build_edge_union, codicil, Sampler, SamplerConfig, StageTimings};
use codicil::seed::derive;
use codicil::synth::PlantedPartition;
use codicil::text::{load_term_vectors, write_term_vectors, ContentIndex, TermVectorStore};
use codicil::{EdgeSet, Graph, VertexSet};

use opts::{Cli, ClusterOpts, Command, ContentOpts, SampleOpts};

const CONTENT_EDGES_FILE: &str = "content_edges.txt";
const SAMPLED_FILE: &str = "sampled.txt";
const CLUSTERS_FILE: &str = "clusters.txt";
const MANIFEST_FILE: &str = "manifest.json";
const EVAL_FILE: &str = "eval.txt";

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CODICIL_LOG", "warn")).init();
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.threads);
            return ExitCode::FAILURE;
        }
    };
    let threads = cli.threads.max(1);
    match pool.install(|| run(cli.command, threads)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, threads: usize) -> Result<()> {
    match command {
        Command::Pipeline(args) => {
            let manifest = RunManifest {
                seed: args.sample.seed,
                sampler: sampler_config(&args.content, &args.sample),
                l: args.cluster.l,
                backend: args.cluster.backend.into(),
                mcl: mcl_of(&args.cluster),
                lp_max_sweeps: args.cluster.max_sweeps,
                partitioner: Some(args.cluster.partitioner.clone()),
                threads,
                inputs: Inputs {
                    graph: path_string(&args.graph),
                    terms: args.terms.as_deref().map(path_string),
                    truth: args.truth.as_deref().map(path_string),
                },
                timings: StageTimings::default(),
                eval_ms: None,
                counts: EdgeCounts::default(),
                requested_clusters: args.cluster.l,
                realized_clusters: 0,
                fscore: None,
            };
            execute(manifest, &args.out_dir)
        }
        Command::Rerun { manifest, out_dir } => {
            let mut m = RunManifest::read(open(&manifest, "rerun")?)
                .with_context(|| format!("rerun: parsing {}", manifest.display()))?;
            m.threads = threads;
            execute(m, &out_dir)
        }
        Command::ContentEdges(args) => {
            let graph = read_graph(&args.graph, "content-edges")?;
            let store = read_terms(&args.terms, graph.vertex_count(), "content-edges")?;
            let cfg = SamplerConfig {
                k: args.content.k,
                m: args.content.m,
                scope: args.content.scope.into(),
                ..Default::default()
            };
            cfg.validate().context("content-edges: configuration")?;
            let edges = ContentIndex::build(&store, cfg.m)
                .content_edges(cfg.k, cfg.scope, Some(&graph))
                .context("content-edges")?;
            write_graph(
                &Graph::from_edge_set(graph.vertex_count(), edges)?,
                &args.out,
            )
            .context("content-edges: writing output")
        }
        Command::Sample(args) => {
            let mut cfg = sampler_config(
                &ContentOpts {
                    k: args.k,
                    m: args.m,
                    scope: opts::ScopeArg::Full,
                },
                &args.sample,
            );
            cfg.validate().context("sample: configuration")?;
            let graph = read_graph(&args.graph, "sample")?;
            let store = match &args.terms {
                Some(p) => read_terms(p, graph.vertex_count(), "sample")?,
                None => TermVectorStore::empty(graph.vertex_count()),
            };
            let content = match &args.content_edges {
                Some(p) => read_graph(p, "sample")?.edges().clone(),
                None => EdgeSet::new(),
            };
            cfg.seed = derive(args.sample.seed, "sample");
            let sampler = Sampler::new(&graph, &content, &store, &cfg).context("sample")?;
            let sampled = if graph.is_weighted() {
                sampler.weighted().run()
            } else {
                sampler.run()
            }
            .context("sample")?;
            println!(
                "union_edges: {}\nsampled_edges: {}",
                build_edge_union(graph.edges(), &content).len(),
                sampled.edge_count()
            );
            write_graph(&sampled, &args.out).context("sample: writing output")
        }
        Command::Cluster(args) => {
            let graph = read_graph(&args.graph, "cluster")?;
            let work = args
                .out
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_default()
                .join("partitioner");
            let clusterer = make_clusterer(
                args.cluster.backend.into(),
                &mcl_of(&args.cluster),
                args.cluster.max_sweeps,
                args.seed,
                &args.cluster.partitioner,
                &work,
            );
            let clustering = clusterer
                .cluster(&graph, args.cluster.l)
                .context("cluster")?;
            println!("clusters: {}", clustering.cluster_count());
            write_clustering(&clustering, &args.out).context("cluster: writing output")
        }
        Command::Evaluate(args) => {
            let pred = read_assignment(open(&args.pred, "evaluate")?)
                .with_context(|| format!("evaluate: reading {}", args.pred.display()))?;
            let truth = load_ground_truth(open(&args.truth, "evaluate")?, pred.vertex_count())
                .with_context(|| format!("evaluate: reading {}", args.truth.display()))?;
            let report = if args.truth_universe {
                let keep: VertexSet = truth.clusters().iter().flat_map(|c| c.iter()).collect();
                let (p, g) = restrict(&pred, &truth, &keep)?;
                fscore_clustering(&p, &g, keep.len())
            } else {
                fscore_clustering(&pred, &truth, pred.vertex_count())
            }
            .context("evaluate")?;
            print!("{}", report.to_text());
            Ok(())
        }
        Command::Diagnose(args) => {
            let graph = read_graph(&args.graph, "diagnose")?;
            println!("vertices: {}", graph.vertex_count());
            println!("edges: {}", graph.edge_count());
            println!("components: {}", graph.count_components());
            println!("largest_component: {}", graph.largest_component_size());
            if let Some(count) = args.spectrum {
                let values = laplacian_spectrum(&graph, count, SpectrumOptions::default())
                    .context("diagnose: spectrum")?;
                println!(
                    "zero_eigenvalues: {}",
                    zero_multiplicity(&values, ZERO_TOLERANCE)
                );
                let text: Vec<String> = values.iter().map(|x| format!("{x:.6}")).collect();
                println!("spectrum: {}", text.join(" "));
            }
            Ok(())
        }
        Command::ExportPartitioner { graph, out } => {
            let graph = read_graph(&graph, "export-partitioner")?;
            export_partitioner_graph(&graph, BufWriter::new(create(&out)?))
                .context("export-partitioner")
        }
        Command::ImportPartition {
            part,
            vertices,
            out,
        } => {
            let clustering = import_partition(open(&part, "import-partition")?, vertices)
                .context("import-partition")?;
            write_clustering(&clustering, &out).context("import-partition")
        }
        Command::Generate(args) => {
            let spec = PlantedPartition {
                communities: args.communities,
                size: args.size,
                p_in: args.p_in,
                p_out: args.p_out,
                noise: args.noise,
                ..Default::default()
            };
            if !(0.0..=1.0).contains(&spec.p_in)
                || !(0.0..=1.0).contains(&spec.p_out)
                || !(0.0..=1.0).contains(&spec.noise)
            {
                bail!("generate: probabilities must lie in [0, 1]");
            }
            let inst = spec.generate(args.seed);
            fs::create_dir_all(&args.out_dir)?;
            write_graph(&inst.graph, &args.out_dir.join("graph.txt"))?;
            write_term_vectors(
                &inst.terms,
                BufWriter::new(create(&args.out_dir.join("terms.txt"))?),
            )?;
            write_ground_truth(
                &inst.truth,
                BufWriter::new(create(&args.out_dir.join("truth.txt"))?),
            )?;
            Ok(())
        }
        Command::ImportLinqs {
            content,
            cites,
            out_dir,
        } => {
            let data = load_linqs(
                open(&content, "import-linqs")?,
                open(&cites, "import-linqs")?,
            )
            .context("import-linqs")?;
            fs::create_dir_all(&out_dir)?;
            write_graph(&data.graph, &out_dir.join("graph.txt"))?;
            write_term_vectors(
                &data.terms,
                BufWriter::new(create(&out_dir.join("terms.txt"))?),
            )?;
            write_ground_truth(
                &data.truth,
                BufWriter::new(create(&out_dir.join("truth.txt"))?),
            )?;
            println!(
                "vertices: {}\nedges: {}\ndropped_citations: {}\nclasses: {}",
                data.graph.vertex_count(),
                data.graph.edge_count(),
                data.dropped_citations,
                data.class_names.join(" ")
            );
            Ok(())
        }
    }
}

/// Runs the full pipeline described by `manifest` and writes every output
/// into `out_dir`.
fn execute(mut manifest: RunManifest, out_dir: &Path) -> Result<()> {
    let mut cfg = manifest.sampler.clone();
    cfg.seed = derive(manifest.seed, "sample");
    cfg.validate().context("pipeline: configuration")?;

    let graph_path = PathBuf::from(&manifest.inputs.graph);
    let graph = read_graph(&graph_path, "pipeline")?;
    let store = match &manifest.inputs.terms {
        Some(p) => read_terms(Path::new(p), graph.vertex_count(), "pipeline")?,
        None => TermVectorStore::empty(graph.vertex_count()),
    };
    let truth = match &manifest.inputs.truth {
        Some(p) => Some(
            load_ground_truth(open(Path::new(p), "pipeline")?, graph.vertex_count())
                .with_context(|| format!("pipeline: reading ground truth {p}"))?,
        ),
        None => None,
    };

    fs::create_dir_all(out_dir)
        .with_context(|| format!("pipeline: creating {}", out_dir.display()))?;
    let clusterer = make_clusterer(
        manifest.backend,
        &manifest.mcl,
        manifest.lp_max_sweeps,
        manifest.seed,
        manifest.partitioner.as_deref().unwrap_or("gpmetis"),
        &out_dir.join("partitioner"),
    );
    let run = if manifest.inputs.terms.is_some() {
        codicil(&graph, &store, &cfg, manifest.l, clusterer.as_ref())
    } else {
        // No content: skip the index and sample the topology alone.
        let t = Instant::now();
        let sampled = Sampler::new(&graph, &EdgeSet::new(), &store, &cfg)?.run()?;
        let sampling_ms = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        let clustering = clusterer.cluster(&sampled, manifest.l)?;
        Ok(codicil::sampler::CodicilRun {
            content_edges: EdgeSet::new(),
            union_edges: graph.edge_count(),
            sampled,
            clustering,
            timings: StageTimings {
                sampling_ms,
                clustering_ms: t.elapsed().as_secs_f64() * 1e3,
                ..Default::default()
            },
        })
    }
    .context("pipeline")?;

    write_graph(
        &Graph::from_edge_set(graph.vertex_count(), run.content_edges.clone())?,
        &out_dir.join(CONTENT_EDGES_FILE),
    )?;
    write_graph(&run.sampled, &out_dir.join(SAMPLED_FILE))?;
    write_clustering(&run.clustering, &out_dir.join(CLUSTERS_FILE))?;

    manifest.timings = run.timings;
    manifest.counts = EdgeCounts {
        topological: graph.edge_count(),
        content: run.content_edges.len(),
        union: run.union_edges,
        sampled: run.sampled.edge_count(),
    };
    manifest.requested_clusters = manifest.l;
    manifest.realized_clusters = run.clustering.cluster_count();

    if let Some(truth) = truth {
        let t = Instant::now();
        let report = fscore_clustering(&run.clustering, &truth, graph.vertex_count())
            .context("pipeline: evaluate")?;
        manifest.eval_ms = Some(t.elapsed().as_secs_f64() * 1e3);
        manifest.fscore = Some(report.fscore);
        fs::write(out_dir.join(EVAL_FILE), report.to_text())?;
        print!("{}", report.to_text());
    }
    manifest.check()?;
    manifest.write(BufWriter::new(create(&out_dir.join(MANIFEST_FILE))?))?;
    info!("wrote outputs to {}", out_dir.display());
    println!(
        "content_edges: {}\nunion_edges: {}\nsampled_edges: {}\nclusters: {}",
        manifest.counts.content,
        manifest.counts.union,
        manifest.counts.sampled,
        manifest.realized_clusters
    );
    Ok(())
}

fn sampler_config(content: &ContentOpts, sample: &SampleOpts) -> SamplerConfig {
    SamplerConfig {
        k: content.k,
        alpha: sample.alpha,
        similarity: sample.sim.into(),
        normalizer: sample.norm.into(),
        scope: content.scope.into(),
        m: content.m,
        hashes: sample.hashes,
        bits: sample.bits,
        seed: sample.seed,
        structural_neighborhood: sample.neighborhood.into(),
        retention: sample.retention.into(),
    }
}

fn mcl_of(opts: &ClusterOpts) -> Mcl {
    Mcl {
        inflation: opts.inflation,
        max_iter: opts.max_iter,
        ..Default::default()
    }
}

fn make_clusterer(
    backend: Backend,
    mcl: &Mcl,
    max_sweeps: usize,
    root_seed: u64,
    partitioner: &str,
    work_dir: &Path,
) -> Box<dyn Clusterer> {
    match backend {
        Backend::Mcl => Box::new(*mcl),
        Backend::Lp => Box::new(LabelPropagation {
            seed: derive(root_seed, "cluster"),
            max_sweeps,
        }),
        Backend::External => Box::new(ExternalPartitioner::new(partitioner, work_dir)),
    }
}

fn path_string(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn open(path: &Path, stage: &str) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("{stage}: opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn read_graph(path: &Path, stage: &str) -> Result<Graph> {
    let loaded = load_edge_list(open(path, stage)?, &LoadOptions::default())
        .with_context(|| format!("{stage}: reading graph {}", path.display()))?;
    let r = loaded.report;
    if r.self_loops_dropped + r.duplicates_merged > 0 {
        log::warn!(
            "{}: dropped {} self-loops, merged {} duplicate edges",
            path.display(),
            r.self_loops_dropped,
            r.duplicates_merged
        );
    }
    Ok(loaded.graph)
}

fn read_terms(path: &Path, vertex_count: usize, stage: &str) -> Result<TermVectorStore> {
    load_term_vectors(open(path, stage)?, Some(vertex_count))
        .with_context(|| format!("{stage}: reading term vectors {}", path.display()))
}

fn write_graph(graph: &Graph, path: &Path) -> Result<()> {
    write_edge_list(graph, BufWriter::new(create(path)?))?;
    Ok(())
}

fn write_clustering(c: &Clustering, path: &Path) -> Result<()> {
    write_assignment(c, BufWriter::new(create(path)?))?;
    Ok(())
}
