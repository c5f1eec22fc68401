use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lexigraph_client::api::{BookFormat, FamilyId, Mode, UploadBook, WarmstartAnswers};
use lexigraph_client::Client;
use lexigraph_core::ingestion::{
    default_stopwords, extract_targets, load_pretagged, load_stopwords, tokenize_and_tag, LexiconTagger, TargetIndex,
};
use lexigraph_core::learner_model::{LearnerModel, UpdateParams};
use lexigraph_core::morphology::{build_families, AffixTable, FamilySet};
use lexigraph_core::pipeline::{family_vocabulary, vocabulary_filter};
use lexigraph_core::planner::{plan_session, Centrality, DEFAULT_RETIREMENT, DEFAULT_SESSION_SIZE};
use lexigraph_core::semantics::{build_graph, GraphExport, GraphParams};
use lexigraph_core::EmbeddingTable;
use lexigraph_service::ServiceConfig;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "lexigraph",
    version,
    about = "Word-family graphs and adaptive vocabulary sessions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract learning targets from a book.
    Ingest {
        #[arg(long)]
        book: PathBuf,
        /// The book is `surface<TAB>lemma<TAB>POS` lines.
        #[arg(long)]
        pretagged: bool,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        min_freq: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Group targets into word families.
    Families {
        #[arg(long)]
        index: PathBuf,
        /// Defaults to the built-in affix table.
        #[arg(long)]
        affixes: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        level_cap: u8,
        /// Extra vocabulary for accepting stripped bases.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the family similarity graph.
    Graph {
        #[arg(long)]
        families: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        tau: f64,
        #[arg(long, default_value_t = 5)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan the next session for a learner model (JSON on stdout).
    Plan {
        #[arg(long)]
        graph: PathBuf,
        /// Defaults to a fresh model.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SESSION_SIZE)]
        size: usize,
        #[arg(long, default_value_t = DEFAULT_RETIREMENT)]
        retirement: f64,
    },
    /// Closeness centrality of every family as CSV.
    Centrality {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        bind: Option<std::net::SocketAddr>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },
    /// Talk to a running service.
    Remote(RemoteArgs),
}

#[derive(Args)]
struct RemoteArgs {
    #[arg(long, env = "LEXIGRAPH_SERVER", default_value = "http://127.0.0.1:8080")]
    server: String,
    #[command(subcommand)]
    command: Remote,
}

#[derive(Subcommand)]
enum Remote {
    /// Upload a book and optionally wait for the build.
    Upload {
        file: PathBuf,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        pretagged: bool,
        #[arg(long)]
        wait: bool,
    },
    Status {
        book: String,
    },
    Graph {
        book: String,
    },
    /// Fetch the yes/no checklist.
    Warmstart {
        learner: String,
        book: String,
        #[arg(long)]
        size: Option<usize>,
    },
    /// Submit checklist answers from a JSON file (`{"answers": [...]}`).
    WarmstartAnswers {
        learner: String,
        book: String,
        file: PathBuf,
    },
    Session {
        learner: String,
        book: String,
        #[arg(long, value_parser = parse_mode, default_value = "learning")]
        mode: Mode,
    },
    Next {
        session: String,
    },
    Answer {
        session: String,
        activity: String,
        chosen: String,
    },
    View {
        learner: String,
        book: String,
        #[arg(long)]
        expand: Option<u32>,
    },
    Model {
        learner: String,
        book: String,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "learning" => Ok(Mode::Learning),
        "testing" => Ok(Mode::Testing),
        _ => Err(format!("`{s}` is not learning or testing")),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<(GraphExport, lexigraph_core::FamilyGraph)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let export: GraphExport = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let graph = export.to_graph()?;
    Ok((export, graph))
}

fn ingest(book: &Path, pretagged: bool, stopwords: Option<&Path>, min_freq: usize, out: &Path) -> Result<()> {
    let corpus = if pretagged {
        load_pretagged(book)?
    } else {
        let text = fs::read_to_string(book).with_context(|| format!("reading {}", book.display()))?;
        tokenize_and_tag(&text, &LexiconTagger::default())?
    };
    let stopwords = match stopwords {
        Some(p) => load_stopwords(p)?,
        None => default_stopwords(),
    };
    let index = extract_targets(&corpus, &stopwords, min_freq)?;
    eprintln!("{} targets from {} types", index.len(), index.distinct_types);
    index.save(out)?;
    Ok(())
}

fn families(index: &Path, affixes: Option<&Path>, level_cap: u8, embeddings: Option<&Path>, out: &Path) -> Result<()> {
    let index = TargetIndex::load(index)?;
    let table = match affixes {
        Some(p) => AffixTable::load(p)?,
        None => AffixTable::default(),
    };
    let vocab = embeddings
        .map(|p| EmbeddingTable::load(p, Some(&vocabulary_filter(&index))))
        .transpose()?;
    let vocab_ref = vocab.as_ref().map(|v| v as &dyn lexigraph_core::morphology::Vocabulary);
    let set = build_families(&index, &table, level_cap, vocab_ref);
    eprintln!("{} families from {} targets", set.len(), index.len());
    set.save(out)?;
    Ok(())
}

fn graph(families: &Path, embeddings: &Path, tau: f64, cap: usize, out: &Path) -> Result<()> {
    let families = FamilySet::load(families)?;
    let table = EmbeddingTable::load(embeddings, Some(&family_vocabulary(&families)))?;
    let graph = build_graph(&families, &table, GraphParams { tau, degree_cap: cap })?;
    eprintln!("{} nodes, {} edges", graph.node_count(), graph.edge_count());
    write_json(out, &GraphExport::new(&graph, &families))
}

fn plan(graph: &Path, model: Option<&Path>, size: usize, retirement: f64) -> Result<()> {
    let (_, graph) = load_graph(graph)?;
    let model = match model {
        Some(p) => LearnerModel::load(p)?,
        None => LearnerModel::new(&graph, "fresh", UpdateParams::default()),
    };
    if model.node_count() != graph.node_count() {
        bail!(
            "model has {} nodes, graph has {}",
            model.node_count(),
            graph.node_count()
        );
    }
    let centrality = Centrality::compute(&graph);
    print_json(&plan_session(&graph, &centrality, &model, size, retirement))
}

fn centrality(graph: &Path) -> Result<()> {
    let (export, graph) = load_graph(graph)?;
    let centrality = Centrality::compute(&graph);
    let mut out = csv::Writer::from_writer(std::io::stdout().lock());
    out.write_record(["family", "representative", "score"])?;
    for s in centrality.ranked() {
        let label = &export.nodes[s.family.index()].representative;
        out.write_record([s.family.to_string(), label.clone(), s.score.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

async fn serve(
    config: Option<PathBuf>,
    bind: Option<std::net::SocketAddr>,
    data_dir: Option<PathBuf>,
    embeddings: Option<PathBuf>,
) -> Result<()> {
    let mut config = match config {
        Some(p) => ServiceConfig::load(p)?,
        None => ServiceConfig::default(),
    };
    if let Some(b) = bind {
        config.bind = b;
    }
    if let Some(d) = data_dir {
        config.data_dir = d;
    }
    if embeddings.is_some() {
        config.engine.embeddings = embeddings;
    }
    if config.engine.embeddings.is_none() {
        eprintln!("warning: no embeddings configured; book builds will fail");
    }
    lexigraph_service::serve(config).await?;
    Ok(())
}

async fn remote(args: RemoteArgs) -> Result<()> {
    let c = Client::new(args.server);
    match args.command {
        Remote::Upload {
            file,
            title,
            pretagged,
            wait,
        } => {
            let content = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let upload = UploadBook {
                title: title.unwrap_or_else(|| file.file_stem().unwrap_or_default().to_string_lossy().into_owned()),
                format: if pretagged {
                    BookFormat::Pretagged
                } else {
                    BookFormat::Text
                },
                content,
            };
            let accepted = c.upload_book(&upload).await?;
            if wait {
                print_json(&c.wait_for_book(&accepted.book_id, Duration::from_millis(500)).await?)
            } else {
                print_json(&accepted)
            }
        }
        Remote::Status { book } => print_json(&c.book_status(&book).await?),
        Remote::Graph { book } => print_json(&c.book_graph(&book).await?),
        Remote::Warmstart { learner, book, size } => print_json(&c.start_warmstart(&learner, &book, size).await?),
        Remote::WarmstartAnswers { learner, book, file } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let answers: WarmstartAnswers = serde_json::from_str(&text)?;
            print_json(&c.submit_warmstart(&learner, &book, &answers).await?)
        }
        Remote::Session { learner, book, mode } => print_json(&c.start_session(&learner, &book, mode).await?),
        Remote::Next { session } => print_json(&c.next_activity(&session).await?),
        Remote::Answer {
            session,
            activity,
            chosen,
        } => print_json(&c.submit_answer(&session, &activity, &chosen).await?),
        Remote::View { learner, book, expand } => {
            print_json(&c.learner_view(&learner, &book, expand.map(FamilyId)).await?)
        }
        Remote::Model { learner, book } => print_json(&c.learner_model(&learner, &book).await?),
    }
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Ingest {
            book,
            pretagged,
            stopwords,
            min_freq,
            out,
        } => ingest(&book, pretagged, stopwords.as_deref(), min_freq, &out),
        Command::Families {
            index,
            affixes,
            level_cap,
            embeddings,
            out,
        } => families(&index, affixes.as_deref(), level_cap, embeddings.as_deref(), &out),
        Command::Graph {
            families,
            embeddings,
            tau,
            cap,
            out,
        } => graph(&families, &embeddings, tau, cap, &out),
        Command::Plan {
            graph,
            model,
            size,
            retirement,
        } => plan(&graph, model.as_deref(), size, retirement),
        Command::Centrality { graph } => centrality(&graph),
        Command::Serve {
            config,
            bind,
            data_dir,
            embeddings,
        } => serve(config, bind, data_dir, embeddings).await,
        Command::Remote(args) => remote(args).await,
    }
}
