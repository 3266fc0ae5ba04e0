//! Command-line front end: one subcommand per role.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{render_table, run_centralized, run_distributed, write_csv, BenchError, BenchSpec, OntologyProfile};
use crate::matchmaker::{match_all_with, Demand, MatchScore, RankComposition};
use crate::net::{
    fanout, serve_provider, serve_registry, FanoutMode, FanoutOutcome, FanoutPlan, NetError, PeerClient,
    ProviderConfig, ProviderNode, ProviderTarget, SubscriptionRequest,
};
use crate::ontology::{load_ontology, tbox_fingerprint, Instance, OntologyDocument, OntologyError, Taxonomy, Value};
use crate::presentation::{
    counted, group_by_additional, provider_sections, render_flat, render_text_flat, render_text_grouped, GroupOrder,
    ResultEntry, Strategy,
};
use crate::profile::{on_login, validate_rules, ProfileStore, Rule, SavedQuery, UserProfile};
use crate::registry::{Registration, Registry};

/// Writes to stdout, ignoring a closed pipe instead of panicking.
macro_rules! say_raw {
    ($($arg:tt)*) => {{
        let _ = write!(std::io::stdout().lock(), $($arg)*);
    }};
}

macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_UNREACHABLE: u8 = 2;
pub const EXIT_PROTOCOL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ontomatch",
    version,
    about = "Ontology-driven matchmaking: validate, match, serve, fan out, recommend, benchmark"
)]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for synthetic data generation.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an ontology document and summarize it.
    Validate { path: PathBuf },
    /// Rank an ontology's supplies against a demand.
    Match(MatchArgs),
    /// Run a provider node.
    ServeProvider(ServeProviderArgs),
    /// Run the ontology registry.
    ServeRegistry(ServeRegistryArgs),
    /// Search the registry by keyword.
    Search {
        #[arg(long)]
        registry: String,
        #[arg(long = "keyword")]
        keywords: Vec<String>,
    },
    /// Send a demand to several providers and merge the answers.
    Fanout(FanoutArgs),
    /// Publish an instance to a provider.
    Publish {
        #[arg(long)]
        provider: String,
        #[arg(long)]
        instance: PathBuf,
    },
    /// User profiles, saved queries and recommendations.
    #[command(subcommand)]
    Profile(ProfileCommand),
    /// Time matchmaking on synthetic ontologies.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum Composition {
    /// Additional properties improve the rank.
    #[default]
    Bonus,
    /// Additional properties worsen the rank.
    Penalty,
}

impl From<Composition> for RankComposition {
    fn from(c: Composition) -> Self {
        match c {
            Composition::Bonus => RankComposition::AdditionalAsBonus,
            Composition::Penalty => RankComposition::AdditionalAsPenalty,
        }
    }
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, value_enum, default_value_t = Strategy::Naive)]
    pub strategy: Strategy,
    #[arg(long, value_enum, default_value_t = GroupOrder::Asc)]
    pub group_order: GroupOrder,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub ontology: PathBuf,
    #[arg(long)]
    pub demand: PathBuf,
    #[command(flatten)]
    pub render: RenderArgs,
    #[arg(long, value_enum, default_value_t = Composition::Bonus)]
    pub composition: Composition,
}

#[derive(Debug, Args)]
pub struct ServeProviderArgs {
    #[arg(long, default_value = "127.0.0.1:7070")]
    pub listen: String,
    #[arg(long)]
    pub ontology: PathBuf,
    /// Registry to announce this provider to.
    #[arg(long)]
    pub registry: Option<String>,
    /// Address announced to the registry; defaults to the bound address.
    #[arg(long)]
    pub advertise: Option<String>,
    #[arg(long, default_value = "provider")]
    pub provider_id: String,
    #[arg(long)]
    pub bench_mode: bool,
    /// Directory persisting profiles and inboxes.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// Static web client served under /ui.
    #[arg(long)]
    pub ui: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeRegistryArgs {
    #[arg(long, default_value = "127.0.0.1:7000")]
    pub listen: String,
    /// Directory holding registry.json.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FanoutArgs {
    #[arg(long)]
    pub demand: PathBuf,
    /// Discover providers through this registry.
    #[arg(long)]
    pub registry: Option<String>,
    #[arg(long = "keyword")]
    pub keywords: Vec<String>,
    /// Explicit provider addresses, in addition to registry hits.
    #[arg(long = "provider")]
    pub providers: Vec<String>,
    #[arg(long, value_enum, default_value_t = FanoutMode::Async)]
    pub mode: FanoutMode,
    #[arg(long, default_value_t = 10_000)]
    pub timeout_ms: u64,
    #[command(flatten)]
    pub render: RenderArgs,
}

#[derive(Debug, Subcommand)]
pub enum ProfileCommand {
    /// Create or update a profile's attributes.
    Set {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        user: String,
        /// `name=value`; numbers and booleans are typed, anything else is text.
        #[arg(long = "attr")]
        attributes: Vec<String>,
    },
    /// Install classification rules.
    Rules {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        file: PathBuf,
        /// Profiler schema the rule attributes are checked against.
        #[arg(long)]
        profiler: Option<PathBuf>,
    },
    /// Save a demand for later replay and publication alerts.
    SaveQuery {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        user: String,
        #[arg(long)]
        demand: PathBuf,
        /// RFC 3339 timestamp or YYYY-MM-DD (end of that day, UTC).
        #[arg(long)]
        valid_until: String,
        #[arg(long)]
        query_id: Option<String>,
    },
    /// Recommendations shown at login.
    Login {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        user: String,
        #[arg(long)]
        ontology: PathBuf,
    },
    /// Pending publication alerts, from a local store or a provider.
    Inbox {
        #[arg(long, conflicts_with = "provider", required_unless_present = "provider")]
        store: Option<PathBuf>,
        #[arg(long)]
        provider: Option<String>,
        #[arg(long)]
        user: String,
    },
    /// Save a demand on a provider for publication alerts.
    Subscribe {
        #[arg(long)]
        provider: String,
        #[arg(long)]
        user: String,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        valid_until: String,
        #[arg(long)]
        query_id: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// computer, books, doc-egov or wine.
    #[arg(long, default_value = "computer")]
    pub profile: String,
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
    /// Property count per query.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub queries: Vec<usize>,
    /// 0 for in-process matchmaking.
    #[arg(long, default_value_t = 0)]
    pub peers: usize,
    #[arg(long, value_enum, default_value_t = FanoutMode::Sync)]
    pub mode: FanoutMode,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[arg(long)]
    pub replicate: bool,
    /// Injected provider delays in ms, cycled over peers.
    #[arg(long, value_delimiter = ',')]
    pub delays: Vec<u64>,
    /// Also write the table as CSV to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// A failed command: message plus process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self::new(EXIT_VALIDATION, message)
    }
}

impl From<OntologyError> for CliError {
    fn from(e: OntologyError) -> Self {
        match e {
            OntologyError::InvalidInstances(vs) => {
                let lines: Vec<String> = vs.iter().map(ToString::to_string).collect();
                Self::validation(format!("invalid instances:\n  {}", lines.join("\n  ")))
            }
            other => Self::validation(other.to_string()),
        }
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        let code = match &e {
            e if e.is_unreachable() => EXIT_UNREACHABLE,
            NetError::Status { status: 400, .. } => EXIT_VALIDATION,
            NetError::Bind { .. } => EXIT_UNREACHABLE,
            _ => EXIT_PROTOCOL,
        };
        let mut message = e.to_string();
        if let NetError::Status { body, .. } = &e {
            for v in &body.violations {
                message.push_str(&format!("\n  {v}"));
            }
        }
        if let NetError::AllFailed(failures) = &e {
            for f in failures {
                message.push_str(&format!("\n  {}: {}", f.address, f.error));
            }
        }
        Self::new(code, message)
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Net(n) => n.into(),
            BenchError::InvalidSpec(_) | BenchError::Generation(_) => Self::validation(e.to_string()),
            other => Self::new(EXIT_PROTOCOL, other.to_string()),
        }
    }
}

impl From<crate::profile::ProfileError> for CliError {
    fn from(e: crate::profile::ProfileError) -> Self {
        Self::validation(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    say!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn check_demand(doc: &OntologyDocument, demand: &Demand) -> CliResult {
    let violations = demand.validate(&doc.schema);
    if violations.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
    Err(CliError::validation(format!("invalid demand:\n  {}", lines.join("\n  "))))
}

fn parse_deadline(s: &str) -> Result<DateTime<Utc>, CliError> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.with_timezone(&Utc));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(23, 59, 59))
        .map(|t| t.and_utc())
        .ok_or_else(|| CliError::validation(format!("`{s}` is neither RFC 3339 nor YYYY-MM-DD")))
}

fn parse_attribute(raw: &str) -> Result<(String, Value), CliError> {
    let (name, value) =
        raw.split_once('=').ok_or_else(|| CliError::validation(format!("attribute `{raw}` is not name=value")))?;
    let value = match serde_json::from_str::<Value>(value) {
        Ok(v @ (Value::Integer(_) | Value::Decimal(_) | Value::Boolean(_))) => v,
        _ => Value::from(value),
    };
    Ok((name.trim().to_owned(), value))
}

fn render_entries(entries: &[ResultEntry], render: &RenderArgs) -> String {
    match render.strategy {
        Strategy::Naive => render_text_flat(entries),
        Strategy::Grouping => render_text_grouped(&group_by_additional(entries, render.group_order)),
    }
}

fn cmd_validate(path: &Path, json: bool) -> CliResult {
    let doc = load_ontology(path)?;
    Taxonomy::build(&doc.schema)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        ontology_uri: &'a str,
        classes: usize,
        datatype_properties: usize,
        object_properties: usize,
        instances: usize,
        tbox_fingerprint: String,
    }
    let summary = Summary {
        ontology_uri: &doc.schema.uri,
        classes: doc.schema.classes.len(),
        datatype_properties: doc.schema.datatype_property_count(),
        object_properties: doc.schema.object_property_count(),
        instances: doc.instances.len(),
        tbox_fingerprint: tbox_fingerprint(&doc.schema),
    };
    if json {
        print_json(&summary);
    } else {
        say!("{}: valid", path.display());
        say!("  ontology:            {}", summary.ontology_uri);
        say!("  classes:             {}", summary.classes);
        say!("  datatype properties: {}", summary.datatype_properties);
        say!("  object properties:   {}", summary.object_properties);
        say!("  instances:           {}", summary.instances);
        say!("  fingerprint:         {}", summary.tbox_fingerprint);
    }
    Ok(())
}

fn cmd_match(args: &MatchArgs, json: bool) -> CliResult {
    let doc = load_ontology(&args.ontology)?;
    let taxonomy = Taxonomy::build(&doc.schema)?;
    let demand: Demand = read_json(&args.demand)?;
    check_demand(&doc, &demand)?;
    let scores: Vec<MatchScore> = match_all_with(&taxonomy, &demand, &doc.instances, args.composition.into())
        .map_err(|e| CliError::validation(e.to_string()))?;
    let entries = render_flat(&scores, &doc.instances);
    match (json, args.render.strategy) {
        (true, Strategy::Naive) => print_json(&scores),
        (true, Strategy::Grouping) => print_json(&group_by_additional(&scores, args.render.group_order)),
        (false, _) => say_raw!("{}", render_entries(&entries, &args.render)),
    }
    Ok(())
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
async fn shutdown_signal() {
    #[cfg(unix)]
    {
        let mut term = match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(s) => s,
            Err(_) => {
                let _ = tokio::signal::ctrl_c().await;
                return;
            }
        };
        tokio::select! {
            _ = tokio::signal::ctrl_c() => {}
            _ = term.recv() => {}
        }
    }
    #[cfg(not(unix))]
    {
        let _ = tokio::signal::ctrl_c().await;
    }
}

async fn cmd_serve_provider(args: &ServeProviderArgs) -> CliResult {
    let doc = load_ontology(&args.ontology)?;
    let uri = doc.schema.uri.clone();
    let keywords = doc.schema.keywords.clone();
    let profiles = match &args.profiles {
        Some(dir) => ProfileStore::open(dir)?,
        None => ProfileStore::in_memory(),
    };
    let config =
        ProviderConfig { provider_id: args.provider_id.clone(), bench_mode: args.bench_mode, ui_dir: args.ui.clone() };
    let node = Arc::new(ProviderNode::new(config, doc, profiles)?);
    let fingerprint = node.fingerprint().to_owned();
    let handle = serve_provider(node, &args.listen).await?;
    say!("provider `{}` listening on {}", args.provider_id, handle.address());
    let _ = std::io::stdout().flush();

    let client = PeerClient::new();
    if let Some(registry) = &args.registry {
        let address = args.advertise.clone().unwrap_or_else(|| handle.address());
        let registration = Registration::new(&uri, keywords, &fingerprint, address);
        let reply = client.register(registry, &registration).await?;
        say!("registered {} with {registry} ({:?})", uri, reply.ack);
        let _ = std::io::stdout().flush();
    }
    shutdown_signal().await;
    if let Some(registry) = &args.registry {
        if let Err(e) = client.deregister(registry, &uri).await {
            tracing::warn!(error = %e, "deregistration failed");
        }
    }
    handle.shutdown().await;
    Ok(())
}

async fn cmd_serve_registry(args: &ServeRegistryArgs) -> CliResult {
    let registry = match &args.data {
        Some(dir) => Registry::open(dir).map_err(|e| CliError::validation(e.to_string()))?,
        None => Registry::in_memory(),
    };
    let handle = serve_registry(registry, &args.listen).await?;
    say!("registry listening on {}", handle.address());
    let _ = std::io::stdout().flush();
    shutdown_signal().await;
    handle.shutdown().await;
    Ok(())
}

async fn cmd_search(registry: &str, keywords: &[String], json: bool) -> CliResult {
    let hits = PeerClient::new().search(registry, keywords).await?;
    if json {
        print_json(&hits);
    } else {
        for e in &hits {
            let kw: Vec<&str> = e.keywords.iter().map(String::as_str).collect();
            say!("{}  {}  [{}]  {}", e.ontology_uri, e.provider_address, kw.join(", "), e.tbox_fingerprint);
        }
    }
    if hits.is_empty() {
        return Err(CliError::new(EXIT_UNREACHABLE, "no ontologies found"));
    }
    Ok(())
}

fn render_fanout(outcome: &FanoutOutcome, render: &RenderArgs) -> String {
    let sections = provider_sections(&outcome.merged.entries, &outcome.merged.providers);
    let mut out = String::new();
    for (i, s) in sections.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("Provider {} at <{}>\n", s.provider.provider_id, s.provider.ontology_uri));
        out.push_str(&render_entries(&s.entries, render));
    }
    out.push_str(&format!(
        "\n{} from {}\n",
        counted(outcome.merged.entries.len(), "merged result", "merged results"),
        counted(sections.len(), "provider", "providers")
    ));
    for p in &outcome.timing.per_provider {
        out.push_str(&format!(
            "  {} ({}): matchmaking {:.3} ms, latency {:.3} ms, wall {:.3} ms\n",
            p.provider_id, p.address, p.matchmaking_ms, p.latency_ms, p.wall_ms
        ));
    }
    out.push_str(&format!("  merge {:.3} ms, total {:.3} ms\n", outcome.timing.merge_ms, outcome.timing.total_wall_ms));
    for f in &outcome.failures {
        out.push_str(&format!("  failed {}: {}\n", f.address, f.error));
    }
    out
}

async fn cmd_fanout(args: &FanoutArgs, json: bool) -> CliResult {
    let demand: Demand = read_json(&args.demand)?;
    let client = PeerClient::new();
    let mut targets: Vec<ProviderTarget> = Vec::new();
    if let Some(registry) = &args.registry {
        for e in client.search(registry, &args.keywords).await? {
            targets.push(ProviderTarget::new(e.provider_address).with_fingerprint(e.tbox_fingerprint));
        }
    }
    targets.extend(args.providers.iter().map(ProviderTarget::new));
    if targets.is_empty() {
        return Err(CliError::new(EXIT_UNREACHABLE, "no providers"));
    }
    let plan = FanoutPlan { providers: targets, mode: args.mode, per_request_timeout_ms: args.timeout_ms };
    let outcome = fanout(&client, &plan, &demand).await?;
    if json {
        print_json(&outcome);
    } else {
        say_raw!("{}", render_fanout(&outcome, &args.render));
    }
    Ok(())
}

async fn cmd_publish(provider: &str, path: &Path, json: bool) -> CliResult {
    let instance: Instance = read_json(path)?;
    let ack = PeerClient::new().publish(provider, &instance).await?;
    if json {
        print_json(&ack);
    } else {
        say!("published {} ({})", ack.instance_id, counted(ack.notifications, "notification", "notifications"));
    }
    Ok(())
}

async fn cmd_profile(command: &ProfileCommand, json: bool) -> CliResult {
    let now = Utc::now();
    match command {
        ProfileCommand::Set { store, user, attributes } => {
            let mut store = ProfileStore::open(store)?;
            let mut profile = store.profile(user).cloned().unwrap_or_else(|| UserProfile::new(user));
            for raw in attributes {
                let (name, value) = parse_attribute(raw)?;
                profile.attributes.insert(name, value);
            }
            store.upsert_profile(profile.clone())?;
            if json {
                print_json(&profile);
            } else {
                say!(
                    "profile {user}: {}, {}",
                    counted(profile.attributes.len(), "attribute", "attributes"),
                    counted(profile.saved_queries.len(), "saved query", "saved queries")
                );
            }
        }
        ProfileCommand::Rules { store, file, profiler } => {
            let rules: Vec<Rule> = read_json(file)?;
            if let Some(path) = profiler {
                validate_rules(&rules, &load_ontology(path)?.schema)?;
            }
            ProfileStore::open(store)?.set_rules(rules.clone())?;
            say!("installed {}", counted(rules.len(), "rule", "rules"));
        }
        ProfileCommand::SaveQuery { store, user, demand, valid_until, query_id } => {
            let demand: Demand = read_json(demand)?;
            let valid_until = parse_deadline(valid_until)?;
            let mut store = ProfileStore::open(store)?;
            let query_id = query_id.clone().unwrap_or_else(|| {
                let n = store.profile(user).map_or(0, |p| p.saved_queries.len());
                format!("q{}", n + 1)
            });
            store.save_query(user, SavedQuery { query_id: query_id.clone(), demand, valid_until }, now)?;
            say!("saved query {query_id} for {user} until {}", valid_until.to_rfc3339());
        }
        ProfileCommand::Login { store, user, ontology } => {
            let store = ProfileStore::open(store)?;
            let doc = load_ontology(ontology)?;
            let taxonomy = Taxonomy::build(&doc.schema)?;
            let profile = store.profile(user).cloned().unwrap_or_else(|| UserProfile::new(user));
            let recs = on_login(&profile, store.rules(), &doc.instances, &taxonomy, now)?;
            if json {
                print_json(&recs);
            } else {
                for r in &recs {
                    let source = match &r.source {
                        crate::profile::RecommendationSource::Category(c) => format!("category {c}"),
                        crate::profile::RecommendationSource::SavedQuery(q) => format!("saved query {q}"),
                    };
                    say!("{}  via {source}  [rank {:.4}]", r.instance_id, r.rank);
                }
                say!("{}", counted(recs.len(), "recommendation", "recommendations"));
            }
        }
        ProfileCommand::Inbox { store, provider, user } => {
            let entries = match (store, provider) {
                (Some(dir), _) => ProfileStore::open(dir)?.inbox(user).to_vec(),
                (None, Some(address)) => PeerClient::new().poll_inbox(address, user).await?,
                (None, None) => unreachable!("clap requires one source"),
            };
            if json {
                print_json(&entries);
            } else {
                for e in &entries {
                    say!("{}  query {}  at {}", e.instance.id, e.query_id, e.event_at.to_rfc3339());
                }
                say!("{}", counted(entries.len(), "entry", "entries"));
            }
        }
        ProfileCommand::Subscribe { provider, user, demand, valid_until, query_id } => {
            let request = SubscriptionRequest {
                user_id: user.clone(),
                demand: read_json(demand)?,
                valid_until: parse_deadline(valid_until)?,
                query_id: query_id.clone(),
            };
            let ack = PeerClient::new().subscribe(provider, &request).await?;
            if json {
                print_json(&ack);
            } else {
                say!("subscribed {} as {} until {}", ack.user_id, ack.query_id, ack.valid_until.to_rfc3339());
            }
        }
    }
    Ok(())
}

async fn cmd_bench(args: &BenchArgs, seed: u64, json: bool) -> CliResult {
    let profile = OntologyProfile::by_name(&args.profile)
        .ok_or_else(|| CliError::validation(format!("unknown profile `{}`", args.profile)))?;
    let spec = BenchSpec {
        profile,
        instance_count: args.instances,
        query_series: args.queries.clone(),
        peers: args.peers,
        mode: args.mode,
        repetitions: args.repetitions,
        seed,
        replicate: args.replicate,
        inject_delays_ms: args.delays.clone(),
    };
    let rows = if spec.peers == 0 { run_centralized(&spec)? } else { run_distributed(&spec).await? };
    if json {
        print_json(&rows);
    } else {
        say_raw!("{}", render_table(&rows));
    }
    if let Some(path) = &args.csv {
        let file = fs::File::create(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        write_csv(&rows, file)?;
    }
    Ok(())
}

async fn dispatch(cli: Cli) -> CliResult {
    match &cli.command {
        Command::Validate { path } => cmd_validate(path, cli.json),
        Command::Match(args) => cmd_match(args, cli.json),
        Command::ServeProvider(args) => cmd_serve_provider(args).await,
        Command::ServeRegistry(args) => cmd_serve_registry(args).await,
        Command::Search { registry, keywords } => cmd_search(registry, keywords, cli.json).await,
        Command::Fanout(args) => cmd_fanout(args, cli.json).await,
        Command::Publish { provider, instance } => cmd_publish(provider, instance, cli.json).await,
        Command::Profile(command) => cmd_profile(command, cli.json).await,
        Command::Bench(args) => cmd_bench(args, cli.seed, cli.json).await,
    }
}

/// Entry point of the `ontomatch` binary.
pub fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: cannot start runtime: {e}");
            return ExitCode::from(EXIT_PROTOCOL);
        }
    };
    match runtime.block_on(dispatch(cli)) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
