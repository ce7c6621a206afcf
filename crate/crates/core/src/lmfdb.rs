//! Newform records and newspace dimensions from the LMFDB, with an on-disk
//! cache and bundled offline fixtures. All network access lives here.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::thread::sleep;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algnum::field::{FieldElement, NumberField};
use crate::algnum::IntPoly;
use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::newforms::record::{strip_header, NewformRecord};
use crate::newforms::DataSource;

pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "BOGOCERT_CACHE";
pub const API_BASE: &str = "https://www.lmfdb.org/api";
pub const MIN_INTERVAL: Duration = Duration::from_secs(1);
pub const RETRIES: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuerySpec {
    Newform { label: String },
    NewspaceDim { level: u64, weight: u64, char_orbit: u64 },
}

impl QuerySpec {
    pub fn newform(label: &str) -> Result<Self> {
        let parts: Vec<&str> = label.split('.').collect();
        let ok = parts.len() == 4
            && parts[0].parse::<u64>().is_ok_and(|n| n > 0)
            && parts[1].parse::<u64>().is_ok_and(|k| k > 0)
            && parts[2..].iter().all(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_lowercase()));
        if !ok {
            return Err(Error::invalid(format!("{label:?} is not a newform label like 30.2.e.a")));
        }
        Ok(QuerySpec::Newform { label: label.to_string() })
    }

    pub fn newspace_dim(level: u64, weight: u64, char_orbit: u64) -> Result<Self> {
        if level == 0 || weight == 0 || char_orbit == 0 || gcd(char_orbit, level) != 1 {
            return Err(Error::invalid(format!("bad newspace query ({level}, {weight}, {char_orbit})")));
        }
        Ok(QuerySpec::NewspaceDim { level, weight, char_orbit })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            QuerySpec::Newform { .. } => "newform",
            QuerySpec::NewspaceDim { .. } => "newspace_dim",
        }
    }

    pub fn cache_key(&self) -> String {
        match self {
            QuerySpec::Newform { label } => label.clone(),
            QuerySpec::NewspaceDim { level, weight, char_orbit } => format!("{level}.{weight}.{char_orbit}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    OfflineOnly,
    CacheFirst,
    Refresh,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub kind: String,
    pub source: Option<String>,
    pub fetched_at: Option<String>,
    pub schema_version: u32,
    pub payload: String,
}

impl CacheEntry {
    /// Split `# name: value` header lines from the payload.
    pub fn parse_file(text: &str) -> (BTreeMap<String, String>, &str) {
        let mut header = BTreeMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some((k, v)) = line.trim_start_matches('#').split_once(':') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        (header, strip_header(text))
    }

    pub fn to_file(&self) -> String {
        let mut s = String::new();
        if let Some(src) = &self.source {
            s.push_str(&format!("# source: {src}\n"));
        }
        if let Some(t) = &self.fetched_at {
            s.push_str(&format!("# fetched: {t}\n"));
        }
        s.push_str(&format!("# schema: {}\n", self.schema_version));
        s.push_str(&self.payload);
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewspaceDim {
    pub level: u64,
    pub weight: u64,
    pub char_orbit: u64,
    pub dim: u64,
}

/// Check a payload against the schema of its query; returns a normalized error.
pub fn validate(q: &QuerySpec, payload: &str, source_name: &str) -> Result<()> {
    match q {
        QuerySpec::Newform { label } => {
            let rec = NewformRecord::parse(payload, source_name)?;
            if &rec.label != label {
                return Err(schema_error(source_name, 1, format!("payload is for {}, expected {label}", rec.label)));
            }
        }
        QuerySpec::NewspaceDim { level, weight, char_orbit } => {
            let d: NewspaceDim = serde_json::from_str(strip_header(payload))
                .map_err(|e| schema_error(source_name, e.line(), e.to_string()))?;
            if (d.level, d.weight, d.char_orbit) != (*level, *weight, *char_orbit) {
                return Err(schema_error(source_name, 1, "payload does not match the query".into()));
            }
        }
    }
    Ok(())
}

fn schema_error(source_name: &str, line: usize, message: String) -> Error {
    Error::Schema { source_name: source_name.to_string(), line, message }
}

macro_rules! bundled {
    ($($kind:literal / $key:literal),* $(,)?) => {
        &[$(($kind, $key, include_str!(concat!("../data/fixtures/", $kind, "/", $key, ".json")))),*]
    };
}

/// Fixtures compiled into the binary: (kind, key, file text).
pub static BUNDLED: &[(&str, &str, &str)] = bundled![
    "newform" / "21.2.e.a",
    "newform" / "24.2.d.a",
    "newform" / "26.2.b.a",
    "newform" / "26.2.c.a",
    "newform" / "30.2.c.a",
    "newform" / "30.2.e.a",
    "newform" / "34.2.c.a",
    "newform" / "35.2.b.a",
    "newform" / "39.2.b.a",
    "newform" / "39.2.j.a",
    "newform" / "42.2.e.a",
    "newform" / "45.2.e.a",
    "newspace_dim" / "10.2.9",
    "newspace_dim" / "13.2.12",
    "newspace_dim" / "13.2.3",
    "newspace_dim" / "13.2.4",
    "newspace_dim" / "14.2.9",
    "newspace_dim" / "15.2.2",
    "newspace_dim" / "15.2.4",
    "newspace_dim" / "17.2.4",
    "newspace_dim" / "21.2.4",
    "newspace_dim" / "5.2.4",
    "newspace_dim" / "7.2.2",
    "newspace_dim" / "8.2.5",
    "newspace_dim" / "9.2.4",
];

pub fn bundled(q: &QuerySpec) -> Option<&'static str> {
    let key = q.cache_key();
    BUNDLED
        .iter()
        .find(|(k, name, _)| *k == q.kind() && *name == key)
        .map(|(_, _, text)| *text)
}

pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<String>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl Default for UreqTransport {
    fn default() -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .build();
        UreqTransport { agent: config.into() }
    }
}

impl Transport for UreqTransport {
    fn get(&self, url: &str) -> Result<String> {
        self.agent
            .get(url)
            .header("User-Agent", concat!("bogocert/", env!("CARGO_PKG_VERSION")))
            .call()
            .map_err(|e| Error::Network(format!("GET {url}: {e}")))?
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Network(format!("reading {url}: {e}")))
    }
}

/// Canned responses keyed by URL; each URL serves its queue in order and
/// then repeats the last response.
#[derive(Default)]
pub struct MockTransport {
    responses: Mutex<HashMap<String, VecDeque<Result<String, String>>>>,
    calls: Mutex<Vec<(String, Instant)>>,
}

impl MockTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&self, url: &str, response: Result<String, String>) {
        self.responses.lock().expect("lock").entry(url.to_string()).or_default().push_back(response);
    }

    pub fn calls(&self) -> Vec<(String, Instant)> {
        self.calls.lock().expect("lock").clone()
    }
}

impl Transport for MockTransport {
    fn get(&self, url: &str) -> Result<String> {
        self.calls.lock().expect("lock").push((url.to_string(), Instant::now()));
        let mut map = self.responses.lock().expect("lock");
        let queue = map.get_mut(url).ok_or_else(|| Error::Network(format!("GET {url}: 404")))?;
        let r = if queue.len() > 1 { queue.pop_front() } else { queue.front().cloned() };
        r.expect("nonempty queue").map_err(Error::Network)
    }
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn get(&self, url: &str) -> Result<String> {
        (**self).get(url)
    }
}

pub fn default_cache_root() -> PathBuf {
    if let Some(p) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(p);
    }
    if let Some(p) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(p).join("bogocert");
    }
    if let Some(p) = std::env::var_os("HOME") {
        return PathBuf::from(p).join(".cache").join("bogocert");
    }
    PathBuf::from("cache")
}

pub struct LmfdbClient {
    cache_root: PathBuf,
    transport: Option<Box<dyn Transport>>,
    policy: Policy,
    api_base: String,
    last_request: Mutex<Option<Instant>>,
    writer: Mutex<()>,
    backoff: Duration,
}

impl LmfdbClient {
    pub fn new(cache_root: impl Into<PathBuf>, transport: Option<Box<dyn Transport>>, policy: Policy) -> Self {
        LmfdbClient {
            cache_root: cache_root.into(),
            transport,
            policy,
            api_base: API_BASE.to_string(),
            last_request: Mutex::new(None),
            writer: Mutex::new(()),
            backoff: Duration::from_millis(500),
        }
    }

    /// Bundled fixtures and the default cache, no network.
    pub fn offline() -> Self {
        Self::new(default_cache_root(), None, Policy::OfflineOnly)
    }

    /// The default cache with network fallback.
    pub fn online(policy: Policy) -> Self {
        Self::new(default_cache_root(), Some(Box::new(UreqTransport::default())), policy)
    }

    pub fn with_api_base(mut self, base: &str) -> Self {
        self.api_base = base.trim_end_matches('/').to_string();
        self
    }

    /// Initial retry delay; doubles after each failed attempt.
    pub fn with_backoff(mut self, delay: Duration) -> Self {
        self.backoff = delay;
        self
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn cache_root(&self) -> &Path {
        &self.cache_root
    }

    fn cache_path(&self, q: &QuerySpec) -> PathBuf {
        self.cache_root.join(q.kind()).join(format!("{}.json", q.cache_key()))
    }

    fn read_cache(&self, q: &QuerySpec) -> Result<Option<String>> {
        let path = self.cache_path(q);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        match validate(q, &text, &path.display().to_string()) {
            Ok(()) => Ok(Some(strip_header(&text).to_string())),
            Err(err) => {
                let bad = path.with_extension("json.quarantined");
                let _guard = self.writer.lock().expect("writer lock");
                fs::rename(&path, &bad)?;
                Err(err)
            }
        }
    }

    fn write_cache(&self, q: &QuerySpec, entry: &CacheEntry) -> Result<()> {
        let path = self.cache_path(q);
        let _guard = self.writer.lock().expect("writer lock");
        fs::create_dir_all(path.parent().expect("cache path has a parent"))?;
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, entry.to_file())?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// The payload for a query under the given policy.
    pub fn fetch(&self, q: &QuerySpec, policy: Policy) -> Result<String> {
        if policy != Policy::Refresh {
            if let Some(p) = self.read_cache(q)? {
                return Ok(p);
            }
            if let Some(text) = bundled(q) {
                return Ok(strip_header(text).to_string());
            }
            if policy == Policy::OfflineOnly {
                return Err(Error::data(format!("{} {} is not cached and the client is offline", q.kind(), q.cache_key())));
            }
        }
        let (source, payload) = self.download(q)?;
        validate(q, &payload, &source)?;
        let entry = CacheEntry {
            key: q.cache_key(),
            kind: q.kind().to_string(),
            source: Some(source),
            fetched_at: Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
            schema_version: SCHEMA_VERSION,
            payload,
        };
        self.write_cache(q, &entry)?;
        Ok(entry.payload)
    }

    fn throttle(&self) {
        let mut last = self.last_request.lock().expect("rate lock");
        if let Some(t) = *last {
            let wait = MIN_INTERVAL.saturating_sub(t.elapsed());
            if !wait.is_zero() {
                sleep(wait);
            }
        }
        *last = Some(Instant::now());
    }

    fn get_json(&self, url: &str) -> Result<Value> {
        let transport = self
            .transport
            .as_ref()
            .ok_or_else(|| Error::data(format!("offline: cannot fetch {url}")))?;
        let mut delay = self.backoff;
        let mut last_err = None;
        for attempt in 0..=RETRIES {
            if attempt > 0 {
                sleep(delay);
                delay *= 2;
            }
            self.throttle();
            match transport.get(url) {
                Ok(body) => {
                    return serde_json::from_str(&body).map_err(|e| schema_error(url, e.line(), e.to_string()));
                }
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.expect("at least one attempt"))
    }

    fn first_row(&self, url: &str) -> Result<Value> {
        let v = self.get_json(url)?;
        v.get("data")
            .and_then(Value::as_array)
            .and_then(|a| a.first())
            .cloned()
            .ok_or_else(|| Error::data(format!("no rows at {url}")))
    }

    /// Download and convert to the fixture schema. Returns (source url, payload).
    fn download(&self, q: &QuerySpec) -> Result<(String, String)> {
        match q {
            QuerySpec::Newform { label } => {
                let url = format!("{}/mf_newforms/?label={label}&_format=json", self.api_base);
                let nf = self.first_row(&url)?;
                let hecke_url = format!("{}/mf_hecke_nf/?label={label}&_format=json", self.api_base);
                let hecke = self.first_row(&hecke_url)?;
                let payload = convert_newform(label, &nf, &hecke).map_err(|e| match e {
                    Error::Schema { line, message, .. } => schema_error(&hecke_url, line, message),
                    other => other,
                })?;
                Ok((url, payload))
            }
            QuerySpec::NewspaceDim { level, weight, char_orbit } => {
                let url = format!("{}/mf_newspaces/?level={level}&weight={weight}&_format=json", self.api_base);
                let v = self.get_json(&url)?;
                let rows = v.get("data").and_then(Value::as_array).cloned().unwrap_or_default();
                let row = rows
                    .iter()
                    .find(|r| {
                        r.get("conrey_indexes")
                            .and_then(Value::as_array)
                            .is_some_and(|c| c.iter().any(|x| x.as_u64() == Some(*char_orbit)))
                    })
                    .ok_or_else(|| Error::data(format!("{url}: no newspace for Conrey index {char_orbit}")))?;
                let dim = row
                    .get("dim")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| schema_error(&url, 1, "newspace row has no dim".into()))?;
                let d = NewspaceDim { level: *level, weight: *weight, char_orbit: *char_orbit, dim };
                Ok((url, serde_json::to_string_pretty(&d).expect("serializable") + "\n"))
            }
        }
    }

    /// Validate a fixture file and store it in the cache. An existing entry
    /// is replaced only under [`Policy::Refresh`]. Returns the entry now in
    /// the cache and whether the file was written.
    pub fn import_fixture(&self, path: &Path) -> Result<(CacheEntry, bool)> {
        let text = fs::read_to_string(path)?;
        let name = path.display().to_string();
        let (header, payload) = CacheEntry::parse_file(&text);
        let q = query_for_payload(payload, &name)?;
        validate(&q, payload, &name)?;
        let entry = CacheEntry {
            key: q.cache_key(),
            kind: q.kind().to_string(),
            source: header.get("source").cloned(),
            fetched_at: header.get("fetched").or_else(|| header.get("computed")).cloned(),
            schema_version: header.get("schema").and_then(|s| s.parse().ok()).unwrap_or(SCHEMA_VERSION),
            payload: payload.to_string(),
        };
        if self.cache_path(&q).exists() && self.policy != Policy::Refresh {
            let existing = fs::read_to_string(self.cache_path(&q))?;
            let (h, p) = CacheEntry::parse_file(&existing);
            return Ok((
                CacheEntry {
                    key: entry.key,
                    kind: entry.kind,
                    source: h.get("source").cloned(),
                    fetched_at: h.get("fetched").cloned(),
                    schema_version: h.get("schema").and_then(|s| s.parse().ok()).unwrap_or(SCHEMA_VERSION),
                    payload: p.to_string(),
                },
                false,
            ));
        }
        self.write_cache(&q, &entry)?;
        Ok((entry, true))
    }
}

fn query_for_payload(payload: &str, name: &str) -> Result<QuerySpec> {
    let v: Value = serde_json::from_str(payload).map_err(|e| schema_error(name, e.line(), e.to_string()))?;
    if let Some(label) = v.get("label").and_then(Value::as_str) {
        return QuerySpec::newform(label);
    }
    let get = |k: &str| v.get(k).and_then(Value::as_u64);
    match (get("level"), get("weight"), get("char_orbit")) {
        (Some(n), Some(k), Some(o)) => QuerySpec::newspace_dim(n, k, o),
        _ => Err(schema_error(name, 1, "neither a newform record nor a newspace dimension".into())),
    }
}

impl DataSource for LmfdbClient {
    fn newform(&self, label: &str) -> Result<NewformRecord> {
        let q = QuerySpec::newform(label)?;
        let payload = self.fetch(&q, self.policy)?;
        NewformRecord::parse(&payload, label)
    }

    fn newspace_dim(&self, level: u64, weight: u64, orbit: u64) -> Result<u64> {
        let q = QuerySpec::newspace_dim(level, weight, orbit)?;
        let payload = self.fetch(&q, self.policy)?;
        let d: NewspaceDim = serde_json::from_str(&payload).map_err(|e| schema_error(&q.cache_key(), e.line(), e.to_string()))?;
        Ok(d.dim)
    }
}

fn big(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn rat_json(c: &BigRational) -> Value {
    if c.is_integer() {
        c.numer().to_string().parse::<i64>().map_or_else(|_| json!(c.numer().to_string()), |i| json!(i))
    } else {
        json!(format!("{}/{}", c.numer(), c.denom()))
    }
}

/// Convert API rows to the fixture schema. Coefficients arrive in the Hecke
/// ring basis (numerator polynomials over denominators) and are rewritten in
/// the power basis; character values arrive on generators of (Z/N)^*.
pub fn convert_newform(label: &str, nf: &Value, hecke: &Value) -> Result<String> {
    let bad = |m: &str| schema_error(label, 1, m.to_string());
    let level = nf.get("level").and_then(Value::as_u64).ok_or_else(|| bad("missing level"))?;
    let weight = nf.get("weight").and_then(Value::as_u64).ok_or_else(|| bad("missing weight"))?;
    let cond = nf.get("char_conductor").and_then(Value::as_u64).ok_or_else(|| bad("missing char_conductor"))?;
    let cm = nf.get("is_cm").and_then(Value::as_bool).unwrap_or(false);
    let poly: Vec<BigInt> = hecke
        .get("field_poly")
        .or_else(|| nf.get("field_poly"))
        .and_then(Value::as_array)
        .and_then(|a| a.iter().map(big).collect())
        .ok_or_else(|| bad("missing field_poly"))?;
    let field = NumberField::from_poly(IntPoly::new(poly.clone()))?;
    let d = field.degree();
    let nums: Vec<Vec<BigInt>> = hecke
        .get("hecke_ring_numerators")
        .and_then(Value::as_array)
        .and_then(|rows| rows.iter().map(|r| r.as_array()?.iter().map(big).collect()).collect())
        .unwrap_or_else(|| (0..d).map(|i| (0..d).map(|j| BigInt::from((i == j) as i64)).collect()).collect());
    let dens: Vec<BigInt> = hecke
        .get("hecke_ring_denominators")
        .and_then(Value::as_array)
        .and_then(|a| a.iter().map(big).collect())
        .unwrap_or_else(|| vec![BigInt::from(1); d]);
    if nums.len() != d || dens.len() != d {
        return Err(bad("Hecke ring basis has the wrong size"));
    }
    let to_power = |v: &Value| -> Result<FieldElement> {
        let cs: Vec<BigInt> = v.as_array().and_then(|a| a.iter().map(big).collect()).ok_or_else(|| bad("bad coefficient vector"))?;
        let mut coords = vec![BigRational::from_integer(0.into()); d];
        for (i, c) in cs.iter().enumerate().take(d) {
            for (j, nij) in nums[i].iter().enumerate().take(d) {
                coords[j] += BigRational::new(c * nij, dens[i].clone());
            }
        }
        FieldElement::new(&field, coords)
    };
    let an_raw = hecke.get("an").and_then(Value::as_array).ok_or_else(|| bad("missing an"))?;
    let mut an = serde_json::Map::new();
    for (i, v) in an_raw.iter().enumerate() {
        let e = to_power(v)?;
        an.insert((i + 1).to_string(), Value::Array(e.coords().iter().map(rat_json).collect()));
    }
    // Character: values on generators mod N, extended multiplicatively.
    let gens = hecke
        .get("hecke_ring_character_values")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing hecke_ring_character_values"))?;
    let mut values: BTreeMap<u64, FieldElement> = BTreeMap::new();
    values.insert(1 % level, FieldElement::one(&field));
    let mut gen_vals = Vec::new();
    for g in gens {
        let pair = g.as_array().ok_or_else(|| bad("bad character value"))?;
        let a = pair.first().and_then(Value::as_u64).ok_or_else(|| bad("bad character generator"))?;
        gen_vals.push((a % level, to_power(pair.get(1).ok_or_else(|| bad("bad character value"))?)?));
    }
    let mut queue: VecDeque<u64> = VecDeque::from([1 % level]);
    while let Some(x) = queue.pop_front() {
        for (g, v) in &gen_vals {
            let y = x * g % level;
            if !values.contains_key(&y) {
                let val = &values[&x] * v;
                values.insert(y, val);
                queue.push_back(y);
            }
        }
    }
    let mut char_values = serde_json::Map::new();
    for a in (0..cond.max(1)).filter(|&a| gcd(a, cond) == 1) {
        let lift = (0..level / cond.max(1))
            .map(|t| a + t * cond)
            .find(|&b| gcd(b, level) == 1)
            .ok_or_else(|| bad("no unit lift"))?;
        let v = values.get(&(lift % level)).ok_or_else(|| bad("character generators do not span (Z/N)^*"))?;
        char_values.insert(a.to_string(), Value::Array(v.coords().iter().map(rat_json).collect()));
    }
    let out = json!({
        "label": label,
        "level": level,
        "weight": weight,
        "char_conductor": cond,
        "char_values": char_values,
        "field_poly": poly.iter().map(|c| c.to_string().parse::<i64>().map_or_else(|_| json!(c.to_string()), |i| json!(i))).collect::<Vec<_>>(),
        "an": an,
        "cm": cm,
    });
    Ok(serde_json::to_string_pretty(&out).expect("serializable") + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys() {
        assert_eq!(QuerySpec::newform("30.2.e.a").unwrap().cache_key(), "30.2.e.a");
        assert_eq!(QuerySpec::newspace_dim(15, 2, 2).unwrap().cache_key(), "15.2.2");
        assert!(QuerySpec::newform("30.2.E").is_err());
        assert!(QuerySpec::newspace_dim(15, 2, 3).is_err());
    }

    #[test]
    fn bundled_fixtures_validate() {
        for (kind, key, text) in BUNDLED {
            let q = query_for_payload(strip_header(text), key).unwrap();
            assert_eq!((q.kind(), q.cache_key().as_str()), (*kind, *key));
            validate(&q, text, key).unwrap();
        }
    }

    #[test]
    fn convert_hecke_basis() {
        let nf = json!({"level": 5, "weight": 2, "char_conductor": 5, "is_cm": false});
        // basis (1, (1+x)/2) of Q(i)
        let hecke = json!({
            "field_poly": [1, 0, 1],
            "hecke_ring_numerators": [[1, 0], [1, 1]],
            "hecke_ring_denominators": [1, 2],
            "hecke_ring_character_values": [[2, [-1, 2]]],
            "an": [[1, 0], [-1, 2]]
        });
        let out = convert_newform("5.2.b.a", &nf, &hecke).unwrap();
        let rec = NewformRecord::parse(&out, "converted").unwrap();
        assert_eq!(rec.a(2).unwrap().coords_string(), "[0, 1]");
        assert_eq!(rec.order_of_chi_at(2), Some(4));
        assert_eq!(rec.order_of_chi_at(4), Some(2));
    }
}
