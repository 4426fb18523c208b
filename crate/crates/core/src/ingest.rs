//! Source-file parsing, firm identity resolution and layer merging.
//!
//! Firms are identified by a normalized `(name, address)` key. Joint patents
//! with `k` firm applicants become the `k(k-1)/2` edges of a complete graph.
//! Every lossy step (duplicate collapse, self-loop drop, non-firm applicant
//! drop) is counted in [`IngestReport`].

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use crate::netcore::Insert;
use crate::{Error, FirmId, IndustryCode, MultiLayerNetwork, Result};

pub const TRANSACTION_HEADER: &str = "src_name\tsrc_addr\tdst_name\tdst_addr";
pub const PATENT_HEADER: &str = "patent_id\tapplicant_name\tapplicant_addr";
pub const INDUSTRY_HEADER: &str = "name\taddr\tindustry_code";

fn normalize(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Normalized firm identity. Two records denote the same firm iff their keys
/// are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityKey {
    name: String,
    address: String,
}

impl EntityKey {
    pub fn new(name: &str, address: &str) -> Self {
        EntityKey {
            name: normalize(name),
            address: normalize(address),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn address(&self) -> &str {
        &self.address
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatentRecord {
    pub patent_id: String,
    applicants: Vec<EntityKey>,
}

impl PatentRecord {
    /// Applicants are deduplicated, keeping first-seen order.
    pub fn new(patent_id: impl Into<String>, applicants: impl IntoIterator<Item = EntityKey>) -> Self {
        let mut seen = BTreeSet::new();
        let applicants = applicants
            .into_iter()
            .filter(|a| seen.insert(a.clone()))
            .collect();
        PatentRecord {
            patent_id: patent_id.into(),
            applicants,
        }
    }

    pub fn applicants(&self) -> &[EntityKey] {
        &self.applicants
    }
}

/// Decides which patent applicants are firms, by corporate-status tokens in
/// the name.
#[derive(Debug, Clone, Default)]
pub enum FirmFilter {
    #[default]
    AcceptAll,
    Tokens(Vec<String>),
}

impl FirmFilter {
    /// One token per line; blank lines and `#` comments are ignored.
    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut tokens = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            tokens.push(normalize(t));
        }
        Ok(FirmFilter::Tokens(tokens))
    }

    pub fn accepts(&self, key: &EntityKey) -> bool {
        match self {
            FirmFilter::AcceptAll => true,
            FirmFilter::Tokens(tokens) => tokens.iter().any(|t| key.name.contains(t.as_str())),
        }
    }
}

fn check_header(first: Option<std::io::Result<String>>, expected: &str) -> Result<()> {
    match first {
        None => Err(Error::Parse {
            line: 1,
            msg: format!("missing header, expected {expected:?}"),
        }),
        Some(line) => {
            let line = line?;
            if line.trim_end_matches('\r') == expected {
                Ok(())
            } else {
                Err(Error::Parse {
                    line: 1,
                    msg: format!("bad header {line:?}, expected {expected:?}"),
                })
            }
        }
    }
}

/// Splits a data row into exactly `N` non-empty fields.
fn fields<const N: usize>(line: &str, lineno: usize) -> Result<[&str; N]> {
    let parts: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
    if parts.len() != N {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected {N} tab-separated fields, found {}", parts.len()),
        });
    }
    if let Some(pos) = parts.iter().position(|p| p.trim().is_empty()) {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("field {} is empty", pos + 1),
        });
    }
    Ok(std::array::from_fn(|k| parts[k]))
}

/// Reads the transaction TSV. Line numbers in errors are 1-based file lines
/// (the header is line 1). Blank lines are skipped.
pub fn parse_transactions(reader: impl BufRead) -> Result<Vec<(EntityKey, EntityKey)>> {
    let mut lines = reader.lines();
    check_header(lines.next(), TRANSACTION_HEADER)?;
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let [sn, sa, dn, da] = fields::<4>(&line, idx + 2)?;
        out.push((EntityKey::new(sn, sa), EntityKey::new(dn, da)));
    }
    Ok(out)
}

/// Reads the patent TSV (one applicant per row) and aggregates rows by
/// `patent_id`. Records are returned in ascending id order.
pub fn parse_patents(reader: impl BufRead) -> Result<Vec<PatentRecord>> {
    let mut lines = reader.lines();
    check_header(lines.next(), PATENT_HEADER)?;
    let mut grouped: BTreeMap<String, Vec<EntityKey>> = BTreeMap::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let [id, name, addr] = fields::<3>(&line, idx + 2)?;
        grouped
            .entry(id.trim().to_string())
            .or_default()
            .push(EntityKey::new(name, addr));
    }
    Ok(grouped
        .into_iter()
        .map(|(id, apps)| PatentRecord::new(id, apps))
        .collect())
}

/// Reads the industry map TSV. A key listed twice with different codes is an
/// error.
pub fn parse_industry_map(reader: impl BufRead) -> Result<BTreeMap<EntityKey, IndustryCode>> {
    let mut lines = reader.lines();
    check_header(lines.next(), INDUSTRY_HEADER)?;
    let mut map = BTreeMap::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 2;
        let [name, addr, code] = fields::<3>(&line, lineno)?;
        let code: IndustryCode = code.parse().map_err(|e: Error| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let key = EntityKey::new(name, addr);
        if let Some(prev) = map.insert(key, code) {
            if prev != code {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("firm already mapped to industry {prev}"),
                });
            }
        }
    }
    Ok(map)
}

/// All unordered applicant pairs of one patent, each as `(min, max)`.
pub fn expand_patent_clique(rec: &PatentRecord) -> BTreeSet<(EntityKey, EntityKey)> {
    let apps = rec.applicants();
    let mut pairs = BTreeSet::new();
    for (i, a) in apps.iter().enumerate() {
        for b in &apps[i + 1..] {
            let pair = if a <= b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            };
            pairs.insert(pair);
        }
    }
    pairs
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub transaction_rows: usize,
    pub patent_records: usize,
    pub non_firm_applicants_dropped: usize,
    pub transaction_firms: usize,
    pub patent_firms: usize,
    pub firms_in_both_layers: usize,
    pub nodes: usize,
    pub arcs: usize,
    pub duplicate_arcs_collapsed: usize,
    pub self_loops_dropped: usize,
    pub patent_edges: usize,
    pub duplicate_patent_edges_collapsed: usize,
    pub industry_labeled: usize,
    pub industry_unmatched_rows: usize,
}

impl IngestReport {
    pub fn rows(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("transaction_rows", self.transaction_rows),
            ("patent_records", self.patent_records),
            ("non_firm_applicants_dropped", self.non_firm_applicants_dropped),
            ("transaction_firms", self.transaction_firms),
            ("patent_firms", self.patent_firms),
            ("firms_in_both_layers", self.firms_in_both_layers),
            ("nodes", self.nodes),
            ("arcs", self.arcs),
            ("duplicate_arcs_collapsed", self.duplicate_arcs_collapsed),
            ("self_loops_dropped", self.self_loops_dropped),
            ("patent_edges", self.patent_edges),
            ("duplicate_patent_edges_collapsed", self.duplicate_patent_edges_collapsed),
            ("industry_labeled", self.industry_labeled),
            ("industry_unmatched_rows", self.industry_unmatched_rows),
        ]
    }
}

/// Result of merging both sources: the network, the id → key registry and
/// the diagnostics.
#[derive(Debug, Clone)]
pub struct Merged {
    pub network: MultiLayerNetwork,
    pub registry: Vec<EntityKey>,
    pub report: IngestReport,
}

impl Merged {
    pub fn id_of(&self, key: &EntityKey) -> Option<FirmId> {
        self.registry.binary_search(key).ok()
    }

    /// Labels nodes from an industry map; keys not present in the network
    /// are counted as unmatched.
    pub fn apply_industries(&mut self, map: &BTreeMap<EntityKey, IndustryCode>) {
        let mut labeled = 0;
        let mut unmatched = 0;
        for (key, &code) in map {
            match self.id_of(key) {
                Some(id) => {
                    self.network
                        .set_industry(id, Some(code))
                        .expect("registry ids are in range");
                    labeled += 1;
                }
                None => unmatched += 1,
            }
        }
        self.report.industry_labeled = labeled;
        self.report.industry_unmatched_rows = unmatched;
    }
}

/// Merges both layers onto one node set. Node ids follow the sorted order of
/// entity keys, so the result does not depend on input row order.
pub fn merge(
    transactions: &[(EntityKey, EntityKey)],
    patents: &[PatentRecord],
    filter: &FirmFilter,
) -> Merged {
    let mut report = IngestReport {
        transaction_rows: transactions.len(),
        patent_records: patents.len(),
        ..Default::default()
    };

    let trans_firms: BTreeSet<&EntityKey> =
        transactions.iter().flat_map(|(a, b)| [a, b]).collect();
    let firm_patents: Vec<PatentRecord> = patents
        .iter()
        .map(|p| {
            let kept: Vec<EntityKey> = p
                .applicants()
                .iter()
                .filter(|a| filter.accepts(a))
                .cloned()
                .collect();
            report.non_firm_applicants_dropped += p.applicants().len() - kept.len();
            PatentRecord::new(p.patent_id.clone(), kept)
        })
        .collect();
    let patent_firms: BTreeSet<&EntityKey> =
        firm_patents.iter().flat_map(|p| p.applicants()).collect();

    report.transaction_firms = trans_firms.len();
    report.patent_firms = patent_firms.len();
    report.firms_in_both_layers = trans_firms.intersection(&patent_firms).count();

    let registry: Vec<EntityKey> = trans_firms
        .union(&patent_firms)
        .map(|&k| k.clone())
        .collect();
    let id = |k: &EntityKey| registry.binary_search(k).expect("key registered");

    let mut network = MultiLayerNetwork::new(registry.len());
    for (src, dst) in transactions {
        match network.add_arc(id(src), id(dst)).expect("ids in range") {
            Insert::Added => {}
            Insert::Duplicate => report.duplicate_arcs_collapsed += 1,
            Insert::SelfLoop => report.self_loops_dropped += 1,
        }
    }
    for rec in &firm_patents {
        for (a, b) in expand_patent_clique(rec) {
            if network.add_patent_edge(id(&a), id(&b)).expect("ids in range") == Insert::Duplicate {
                report.duplicate_patent_edges_collapsed += 1;
            }
        }
    }
    report.nodes = network.n();
    report.arcs = network.arc_count();
    report.patent_edges = network.patent_edge_count();

    Merged {
        network,
        registry,
        report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DegreeMode, Layer};
    use proptest::prelude::*;

    fn key(n: &str) -> EntityKey {
        EntityKey::new(n, "addr")
    }

    #[test]
    fn normalization() {
        assert_eq!(
            EntityKey::new("  Foo   Co.,\tLtd ", "1-2  Chiyoda "),
            EntityKey::new("foo co., ltd", "1-2 CHIYODA")
        );
        assert_ne!(EntityKey::new("foo", "a"), EntityKey::new("foo", "b"));
    }

    #[test]
    fn header_only_transactions() {
        let txt = format!("{TRANSACTION_HEADER}\n");
        assert!(parse_transactions(txt.as_bytes()).unwrap().is_empty());
        assert!(matches!(
            parse_transactions("".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn one_transaction_row() {
        let txt = format!("{TRANSACTION_HEADER}\na\taddr1\tb\taddr2\n");
        let rows = parse_transactions(txt.as_bytes()).unwrap();
        assert_eq!(rows, vec![(EntityKey::new("a", "addr1"), EntityKey::new("b", "addr2"))]);
    }

    #[test]
    fn malformed_row_names_its_line() {
        // header is line 1; the malformed row sits on line 3
        let txt = format!("{TRANSACTION_HEADER}\na\tx\tb\ty\nc\tx\td\ne\tx\tf\ty\n");
        match parse_transactions(txt.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn patents_grouped_by_id() {
        let txt = format!("{PATENT_HEADER}\np2\tA\taddr\np1\tB\taddr\np2\tC\taddr\np2\ta\taddr\n");
        let recs = parse_patents(txt.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].patent_id, "p1");
        // "A" and "a" normalize to the same key
        assert_eq!(recs[1].applicants(), &[key("a"), key("c")]);
    }

    #[test]
    fn industry_map_parsing() {
        let txt = format!("{INDUSTRY_HEADER}\nA\taddr\t13\nB\taddr\t14\n");
        let map = parse_industry_map(txt.as_bytes()).unwrap();
        assert_eq!(map[&key("a")].get(), 13);
        let bad = format!("{INDUSTRY_HEADER}\nA\tx\t35\n");
        assert!(matches!(
            parse_industry_map(bad.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        let conflict = format!("{INDUSTRY_HEADER}\nA\tx\t3\na\tx\t4\n");
        assert!(parse_industry_map(conflict.as_bytes()).is_err());
    }

    #[test]
    fn clique_sizes() {
        let rec = |k: usize| PatentRecord::new("p", (0..k).map(|i| key(&format!("f{i}"))));
        assert!(expand_patent_clique(&rec(1)).is_empty());
        assert_eq!(expand_patent_clique(&rec(2)).len(), 1);
        let five = expand_patent_clique(&rec(5));
        let mut brute = BTreeSet::new();
        for i in 0..5 {
            for j in 0..5 {
                if i < j {
                    brute.insert((format!("f{i}"), format!("f{j}")));
                }
            }
        }
        let got: BTreeSet<_> = five
            .iter()
            .map(|(a, b)| (a.name().to_string(), b.name().to_string()))
            .collect();
        assert_eq!(got, brute);
        assert_eq!(got.len(), 10);
    }

    #[test]
    fn disjoint_and_overlapping_merges() {
        let trans = vec![(key("a"), key("b")), (key("b"), key("c"))];
        let pats = vec![PatentRecord::new("p", [key("d"), key("e")])];
        let m = merge(&trans, &pats, &FirmFilter::AcceptAll);
        assert_eq!(m.network.n(), 5);
        assert_eq!(m.report.firms_in_both_layers, 0);

        let trans = vec![(key("a"), key("a"))];
        let pats = vec![PatentRecord::new("p", [key("a")])];
        let m = merge(&trans, &pats, &FirmFilter::AcceptAll);
        assert_eq!(m.network.n(), 1);
        assert_eq!(m.report.self_loops_dropped, 1);
        assert_eq!(m.report.firms_in_both_layers, 1);
    }

    #[test]
    fn shared_firm_is_keyed_once() {
        // 4 transaction firms + 3 patent firms, one shared => 6 nodes
        let trans = vec![(key("a"), key("b")), (key("c"), key("d"))];
        let pats = vec![PatentRecord::new("p", [key("d"), key("e"), key("f")])];
        let m = merge(&trans, &pats, &FirmFilter::AcceptAll);
        let mut hand: Vec<&str> = vec!["a", "b", "c", "d", "e", "f"];
        hand.sort();
        let names: Vec<&str> = m.registry.iter().map(EntityKey::name).collect();
        assert_eq!(names, hand);
        assert_eq!(m.network.n(), 6);
        assert_eq!(m.report.firms_in_both_layers, 1);
        assert_eq!(m.network.patent_edge_count(), 3);
        let d = m.id_of(&key("d")).unwrap();
        assert!(m.network.has_arc(m.id_of(&key("c")).unwrap(), d));
    }

    #[test]
    fn duplicates_are_reported() {
        let trans = vec![(key("a"), key("b")), (key("a"), key("b")), (key("b"), key("a"))];
        let pats = vec![
            PatentRecord::new("p1", [key("a"), key("b")]),
            PatentRecord::new("p2", [key("b"), key("a")]),
        ];
        let m = merge(&trans, &pats, &FirmFilter::AcceptAll);
        assert_eq!(m.network.arc_count(), 2);
        assert_eq!(m.report.duplicate_arcs_collapsed, 1);
        assert_eq!(m.report.duplicate_patent_edges_collapsed, 1);
    }

    #[test]
    fn firm_filter_drops_non_firms() {
        let filter = FirmFilter::from_reader("# suffixes\nco., ltd\n\nK.K.\n".as_bytes()).unwrap();
        let pats = vec![PatentRecord::new(
            "p",
            [key("Alpha Co., Ltd"), key("Univ. of Somewhere"), key("Beta k.k.")],
        )];
        let m = merge(&[], &pats, &filter);
        assert_eq!(m.report.non_firm_applicants_dropped, 1);
        assert_eq!(m.network.n(), 2);
        assert_eq!(m.network.patent_edge_count(), 1);
    }

    #[test]
    fn industries_applied() {
        let trans = vec![(key("a"), key("b"))];
        let mut m = merge(&trans, &[], &FirmFilter::AcceptAll);
        let map = BTreeMap::from([
            (key("a"), IndustryCode::new(13).unwrap()),
            (key("zz"), IndustryCode::new(2).unwrap()),
        ]);
        m.apply_industries(&map);
        assert_eq!(m.network.industry(0).map(IndustryCode::get), Some(13));
        assert_eq!(m.network.industry(1), None);
        assert_eq!(m.report.industry_labeled, 1);
        assert_eq!(m.report.industry_unmatched_rows, 1);
    }

    fn sorted_degrees(m: &Merged) -> (Vec<usize>, Vec<usize>) {
        let mut t = m.network.degree_sequence(Layer::Transaction, DegreeMode::Total).unwrap();
        let mut p = m.network.degree_sequence(Layer::Patent, DegreeMode::Undirected).unwrap();
        t.sort();
        p.sort();
        (t, p)
    }

    proptest! {
        #[test]
        fn clique_size_is_k_choose_2(k in 0usize..40) {
            let rec = PatentRecord::new("p", (0..k).map(|i| key(&i.to_string())));
            prop_assert_eq!(expand_patent_clique(&rec).len(), k * k.saturating_sub(1) / 2);
        }

        #[test]
        fn merge_is_order_insensitive(
            trans in prop::collection::vec((0u8..12, 0u8..12), 0..40),
            pats in prop::collection::vec(prop::collection::vec(0u8..12, 1..5), 0..10),
            shift in 0usize..40,
        ) {
            let t: Vec<_> = trans.iter().map(|&(a, b)| (key(&a.to_string()), key(&b.to_string()))).collect();
            let p: Vec<_> = pats.iter().enumerate()
                .map(|(i, apps)| PatentRecord::new(format!("p{i}"), apps.iter().map(|a| key(&a.to_string()))))
                .collect();
            let m1 = merge(&t, &p, &FirmFilter::AcceptAll);
            let mut t2 = t.clone();
            if !t2.is_empty() { let s = shift % t2.len(); t2.rotate_left(s); }
            let mut p2 = p.clone();
            p2.reverse();
            let m2 = merge(&t2, &p2, &FirmFilter::AcceptAll);
            prop_assert_eq!(sorted_degrees(&m1), sorted_degrees(&m2));

            let only_t = merge(&t, &[], &FirmFilter::AcceptAll).network.n();
            let only_p = merge(&[], &p, &FirmFilter::AcceptAll).network.n();
            prop_assert!(m1.network.n() <= only_t + only_p);
            prop_assert_eq!(m1.network.n() == only_t + only_p, m1.report.firms_in_both_layers == 0);
        }
    }
}
