use std::fs;
use std::sync::Arc;
use std::time::Duration;

use bogocert::lmfdb::{bundled, CacheEntry, LmfdbClient, MockTransport, Policy, QuerySpec, MIN_INTERVAL, RETRIES};
use bogocert::newforms::record::strip_header;
use bogocert::newforms::DataSource;
use bogocert::Error;
use serde_json::{json, Value};

const BASE: &str = "http://mock.test/api";

fn newspace_url(level: u64, weight: u64) -> String {
    format!("{BASE}/mf_newspaces/?level={level}&weight={weight}&_format=json")
}

fn mock_client(dir: &std::path::Path, policy: Policy) -> (Arc<MockTransport>, LmfdbClient) {
    let mock = Arc::new(MockTransport::new());
    let client = LmfdbClient::new(dir, Some(Box::new(mock.clone())), policy)
        .with_api_base(BASE)
        .with_backoff(Duration::from_millis(5));
    (mock, client)
}

fn newspace_body(dim: u64) -> String {
    json!({"data": [
        {"label": "11.2.a", "conrey_indexes": [1], "dim": 1},
        {"label": "11.2.c", "conrey_indexes": [3, 4, 5, 9], "dim": dim},
    ]})
    .to_string()
}

#[test]
fn offline_serves_bundled_fixtures_without_a_cache() {
    let dir = tempfile::tempdir().unwrap();
    let client = LmfdbClient::new(dir.path(), None, Policy::OfflineOnly);
    let rec = client.newform("30.2.e.a").unwrap();
    assert_eq!(rec.level, 30);
    assert_eq!(client.newspace_dim(15, 2, 2).unwrap(), 0);
    assert_eq!(client.newspace_dim(13, 2, 4).unwrap(), 1);
    // Nothing gets written when serving bundled data.
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn offline_miss_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let client = LmfdbClient::new(dir.path(), None, Policy::OfflineOnly);
    assert!(matches!(client.newform("11.2.a.a"), Err(Error::DataInsufficient(_))));
    assert!(matches!(client.newspace_dim(11, 2, 1), Err(Error::DataInsufficient(_))));
}

#[test]
fn network_fetch_is_validated_cached_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let (mock, client) = mock_client(dir.path(), Policy::CacheFirst);
    mock.push(&newspace_url(11, 2), Ok(newspace_body(2)));
    assert_eq!(client.newspace_dim(11, 2, 3).unwrap(), 2);
    assert_eq!(mock.calls().len(), 1);

    let path = dir.path().join("newspace_dim").join("11.2.3.json");
    let text = fs::read_to_string(&path).unwrap();
    let (header, payload) = CacheEntry::parse_file(&text);
    assert_eq!(header["source"], newspace_url(11, 2));
    assert!(header["fetched"].ends_with('Z'));
    assert_eq!(header["schema"], "1");
    let v: Value = serde_json::from_str(payload).unwrap();
    assert_eq!(v["dim"], 2);

    // Second call is a cache hit.
    assert_eq!(client.newspace_dim(11, 2, 3).unwrap(), 2);
    assert_eq!(mock.calls().len(), 1);
}

#[test]
fn refresh_refetches_even_when_cached() {
    let dir = tempfile::tempdir().unwrap();
    let (mock, client) = mock_client(dir.path(), Policy::Refresh);
    mock.push(&newspace_url(11, 2), Ok(newspace_body(2)));
    mock.push(&newspace_url(11, 2), Ok(newspace_body(4)));
    assert_eq!(client.newspace_dim(11, 2, 3).unwrap(), 2);
    assert_eq!(client.newspace_dim(11, 2, 3).unwrap(), 4);
    assert_eq!(mock.calls().len(), 2);
    // Refresh even bypasses the bundled copy.
    let q = QuerySpec::newspace_dim(15, 2, 2).unwrap();
    assert!(bundled(&q).is_some());
    assert!(matches!(client.fetch(&q, Policy::Refresh), Err(Error::Network(_))));
}

#[test]
fn transient_failures_are_retried_with_throttling() {
    let dir = tempfile::tempdir().unwrap();
    let (mock, client) = mock_client(dir.path(), Policy::CacheFirst);
    let url = newspace_url(11, 2);
    mock.push(&url, Err("503".into()));
    mock.push(&url, Ok(newspace_body(2)));
    assert_eq!(client.newspace_dim(11, 2, 3).unwrap(), 2);
    let calls = mock.calls();
    assert_eq!(calls.len(), 2);
    assert!(calls[1].1.duration_since(calls[0].1) >= MIN_INTERVAL);
}

#[test]
fn persistent_failure_gives_up_after_retries() {
    let dir = tempfile::tempdir().unwrap();
    let (mock, client) = mock_client(dir.path(), Policy::CacheFirst);
    mock.push(&newspace_url(11, 2), Err("connection refused".into()));
    let err = client.newspace_dim(11, 2, 3).unwrap_err();
    assert!(matches!(err, Error::Network(_)));
    assert_eq!(mock.calls().len() as u32, RETRIES + 1);
    assert!(!dir.path().join("newspace_dim").join("11.2.3.json").exists());
}

#[test]
fn malformed_response_is_a_schema_error_and_not_cached() {
    let dir = tempfile::tempdir().unwrap();
    let (mock, client) = mock_client(dir.path(), Policy::CacheFirst);
    mock.push(&newspace_url(11, 2), Ok(json!({"data": [{"conrey_indexes": [3]}]}).to_string()));
    assert!(matches!(client.newspace_dim(11, 2, 3), Err(Error::Schema { .. })));
    mock.push(&newspace_url(12, 2), Ok("{not json".into()));
    assert!(matches!(client.newspace_dim(12, 2, 5), Err(Error::Schema { .. })));
    assert!(!dir.path().join("newspace_dim").exists());
}

#[test]
fn corrupt_cache_entries_are_quarantined() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("newform");
    fs::create_dir_all(&sub).unwrap();
    let path = sub.join("30.2.e.a.json");
    fs::write(&path, "# source: x\n{\"label\": \"30.2.e.a\", \"level\": 30,\n \"weight\": }\n").unwrap();
    let client = LmfdbClient::new(dir.path(), None, Policy::OfflineOnly);
    match client.newform("30.2.e.a") {
        Err(Error::Schema { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a schema error, got {other:?}"),
    }
    assert!(!path.exists());
    assert!(sub.join("30.2.e.a.json.quarantined").exists());
    // With the bad file out of the way the bundled record is used.
    assert_eq!(client.newform("30.2.e.a").unwrap().level, 30);
}

#[test]
fn import_round_trip_is_byte_identical() {
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let a = LmfdbClient::new(first.path(), None, Policy::OfflineOnly);
    let b = LmfdbClient::new(second.path(), None, Policy::OfflineOnly);
    for kind in ["newform", "newspace_dim"] {
        for entry in fs::read_dir(fixtures.join(kind)).unwrap() {
            let path = entry.unwrap().path();
            let original = fs::read_to_string(&path).unwrap();
            let (imported, stored) = a.import_fixture(&path).unwrap();
            assert!(stored);
            assert_eq!(imported.payload, strip_header(&original));

            let cached = first.path().join(kind).join(path.file_name().unwrap());
            let cached_text = fs::read_to_string(&cached).unwrap();
            b.import_fixture(&cached).unwrap();
            let copied = fs::read_to_string(second.path().join(kind).join(path.file_name().unwrap())).unwrap();
            assert_eq!(copied, cached_text, "{}", path.display());

            let q = match kind {
                "newform" => QuerySpec::newform(&imported.key).unwrap(),
                _ => {
                    let v: Value = serde_json::from_str(&imported.payload).unwrap();
                    QuerySpec::newspace_dim(
                        v["level"].as_u64().unwrap(),
                        v["weight"].as_u64().unwrap(),
                        v["char_orbit"].as_u64().unwrap(),
                    )
                    .unwrap()
                }
            };
            assert_eq!(a.fetch(&q, Policy::OfflineOnly).unwrap(), imported.payload);
        }
    }
}

#[test]
fn import_keeps_existing_entry_unless_refreshing() {
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures/newspace_dim");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("15.2.2.json");
    let original = fs::read_to_string(fixtures.join("15.2.2.json")).unwrap();
    fs::write(&path, original.replace("\"dim\": 0", "\"dim\": 7")).unwrap();

    let keep = LmfdbClient::new(dir.path().join("cache"), None, Policy::CacheFirst);
    keep.import_fixture(&fixtures.join("15.2.2.json")).unwrap();
    let (entry, stored) = keep.import_fixture(&path).unwrap();
    assert!(!stored);
    assert!(entry.payload.contains("\"dim\": 0"));
    assert_eq!(keep.newspace_dim(15, 2, 2).unwrap(), 0);

    let refresh = LmfdbClient::new(dir.path().join("cache"), None, Policy::Refresh);
    let (entry, stored) = refresh.import_fixture(&path).unwrap();
    assert!(stored);
    assert!(entry.payload.contains("\"dim\": 7"));
    assert_eq!(keep.newspace_dim(15, 2, 2).unwrap(), 7);
}

#[test]
fn import_rejects_invalid_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"level\": 15, \"weight\": 2}").unwrap();
    let client = LmfdbClient::new(dir.path().join("cache"), None, Policy::CacheFirst);
    assert!(matches!(client.import_fixture(&path), Err(Error::Schema { .. })));
    assert!(matches!(client.import_fixture(&dir.path().join("missing.json")), Err(Error::Io(_))));
}

/// Rebuild the API rows for a bundled record and check the converter
/// reproduces the record.
#[test]
fn downloaded_newform_matches_bundled_record() {
    let label = "24.2.d.a";
    let fixture: Value =
        serde_json::from_str(strip_header(bundled(&QuerySpec::newform(label).unwrap()).unwrap())).unwrap();
    let an: Vec<Value> = (1..=fixture["an"].as_object().unwrap().len())
        .map(|n| fixture["an"][n.to_string()].clone())
        .collect();
    // (Z/24)^* is generated by 7, 13, 17; the character has conductor 8.
    let gens: Vec<Value> = [7u64, 13, 17].iter().map(|&g| json!([g, fixture["char_values"][(g % 8).to_string()]])).collect();
    let nf = json!({"data": [{"label": label, "level": 24, "weight": 2, "char_conductor": 8, "is_cm": false}]});
    let hecke = json!({"data": [{
        "label": label,
        "field_poly": fixture["field_poly"],
        "hecke_ring_numerators": [[1, 0], [0, 1]],
        "hecke_ring_denominators": [1, 1],
        "an": an,
        "hecke_ring_character_values": gens,
    }]});

    let dir = tempfile::tempdir().unwrap();
    let (mock, client) = mock_client(dir.path(), Policy::Refresh);
    mock.push(&format!("{BASE}/mf_newforms/?label={label}&_format=json"), Ok(nf.to_string()));
    mock.push(&format!("{BASE}/mf_hecke_nf/?label={label}&_format=json"), Ok(hecke.to_string()));
    let fetched = client.newform(label).unwrap();
    let reference = LmfdbClient::new(dir.path().join("none"), None, Policy::OfflineOnly).newform(label).unwrap();
    assert_eq!(fetched.an, reference.an);
    assert_eq!(fetched.char_values, reference.char_values);
    assert_eq!(fetched.char_conductor, 8);
    assert!(dir.path().join("newform").join("24.2.d.a.json").exists());
}

#[test]
fn concurrent_cache_reads_and_writes() {
    let dir = tempfile::tempdir().unwrap();
    let (mock, client) = mock_client(dir.path(), Policy::CacheFirst);
    for n in [11u64, 12, 13, 14] {
        mock.push(&newspace_url(n, 2), Ok(json!({"data": [{"conrey_indexes": [1], "dim": n}]}).to_string()));
    }
    std::thread::scope(|s| {
        for n in [11u64, 12, 13, 14] {
            let client = &client;
            s.spawn(move || assert_eq!(client.newspace_dim(n, 2, 1).unwrap(), n));
        }
    });
    for n in [11u64, 12, 13, 14] {
        assert_eq!(client.newspace_dim(n, 2, 1).unwrap(), n);
    }
    assert_eq!(mock.calls().len(), 4);
}
