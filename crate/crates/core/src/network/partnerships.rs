use std::collections::HashSet;

use rand::seq::SliceRandom;

use super::population::{NetworkParams, Population};
use super::EdgeKind;
use crate::error::Result;
use crate::rng::{DurationGeometric, RngStream};
use crate::{Day, NodeId};

/// Random re-draws allowed when a stub pair is a self-loop or a duplicate.
const MAX_REPAIR_ATTEMPTS: usize = 64;

#[inline]
fn pair_key(a: NodeId, b: NodeId) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistentEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: EdgeKind,
    pub remaining_days: u32,
    pub formed_day: Day,
    log_row: Option<usize>,
}

/// One row per edge lifetime. The edge is live on network snapshots
/// `formed_day..dissolved_day`; the snapshot for day `d` is the edge set left
/// by that day's network update and is what the next day's contacts run on.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeLifetime {
    pub u: NodeId,
    pub v: NodeId,
    pub kind: EdgeKind,
    pub formed_day: Day,
    pub dissolved_day: Option<Day>,
    /// Global order of persistent-edge dissolutions, for replaying exclusion.
    pub dissolve_seq: Option<u64>,
}

impl EdgeLifetime {
    pub fn live_on(&self, day: Day) -> bool {
        self.formed_day <= day && self.dissolved_day.is_none_or(|d| d > day)
    }
}

#[derive(Clone, Debug, Default)]
pub struct EdgeLog {
    rows: Vec<EdgeLifetime>,
    next_seq: u64,
    last_day: Day,
}

impl EdgeLog {
    pub fn rows(&self) -> &[EdgeLifetime] {
        &self.rows
    }

    /// Last network snapshot day covered by the log.
    pub fn last_day(&self) -> Day {
        self.last_day
    }

    fn open(&mut self, u: NodeId, v: NodeId, kind: EdgeKind, day: Day) -> usize {
        self.rows.push(EdgeLifetime {
            u,
            v,
            kind,
            formed_day: day,
            dissolved_day: None,
            dissolve_seq: None,
        });
        self.rows.len() - 1
    }

    fn close(&mut self, row: usize, day: Day) {
        let r = &mut self.rows[row];
        r.dissolved_day = Some(day);
        r.dissolve_seq = Some(self.next_seq);
        self.next_seq += 1;
    }
}

#[derive(Clone, Debug)]
pub struct PartnershipSet {
    persistent: Vec<PersistentEdge>,
    onetime: Vec<(NodeId, NodeId)>,
    live_main: HashSet<u64>,
    live_casual: HashSet<u64>,
    log: Option<EdgeLog>,
    counts: Vec<u32>,
    stubs: Vec<NodeId>,
}

impl PartnershipSet {
    pub fn new(record_log: bool) -> Self {
        Self {
            persistent: Vec::new(),
            onetime: Vec::new(),
            live_main: HashSet::new(),
            live_casual: HashSet::new(),
            log: record_log.then(EdgeLog::default),
            counts: Vec::new(),
            stubs: Vec::new(),
        }
    }

    pub fn persistent(&self) -> &[PersistentEdge] {
        &self.persistent
    }

    pub fn onetime(&self) -> &[(NodeId, NodeId)] {
        &self.onetime
    }

    pub fn log(&self) -> Option<&EdgeLog> {
        self.log.as_ref()
    }

    pub fn take_log(&mut self) -> Option<EdgeLog> {
        self.log.take()
    }

    pub fn count(&self, kind: EdgeKind) -> usize {
        match kind {
            EdgeKind::Main => self.live_main.len(),
            EdgeKind::Casual => self.live_casual.len(),
            EdgeKind::OneTime => self.onetime.len(),
        }
    }

    /// Every live edge with its kind: persistent edges first, then one-time.
    pub fn live_edges(&self) -> impl Iterator<Item = (NodeId, NodeId, EdgeKind)> + '_ {
        self.persistent
            .iter()
            .map(|e| (e.a, e.b, e.kind))
            .chain(self.onetime.iter().map(|&(a, b)| (a, b, EdgeKind::OneTime)))
    }

    pub fn is_live(&self, a: NodeId, b: NodeId, kind: EdgeKind) -> bool {
        let key = pair_key(a, b);
        match kind {
            EdgeKind::Main => self.live_main.contains(&key),
            EdgeKind::Casual => self.live_casual.contains(&key),
            EdgeKind::OneTime => self.onetime.iter().any(|&(x, y)| pair_key(x, y) == key),
        }
    }

    /// Live persistent degree of each node for one kind.
    pub fn degrees(&self, n: usize, kind: EdgeKind) -> Vec<u32> {
        let mut deg = vec![0u32; n];
        for (a, b, k) in self.live_edges() {
            if k == kind {
                deg[a as usize] += 1;
                deg[b as usize] += 1;
            }
        }
        deg
    }

    fn live_set(&mut self, kind: EdgeKind) -> &mut HashSet<u64> {
        match kind {
            EdgeKind::Main => &mut self.live_main,
            EdgeKind::Casual => &mut self.live_casual,
            EdgeKind::OneTime => unreachable!("one-time edges are not keyed"),
        }
    }

    fn add_persistent(&mut self, a: NodeId, b: NodeId, kind: EdgeKind, duration: u32, day: Day) {
        debug_assert_ne!(a, b);
        let inserted = self.live_set(kind).insert(pair_key(a, b));
        debug_assert!(inserted, "duplicate {kind:?} edge {a}-{b}");
        let log_row = self.log.as_mut().map(|log| log.open(a, b, kind, day));
        self.persistent.push(PersistentEdge {
            a,
            b,
            kind,
            remaining_days: duration,
            formed_day: day,
            log_row,
        });
    }

    fn set_onetime(&mut self, pairs: Vec<(NodeId, NodeId)>, day: Day) {
        if let Some(log) = self.log.as_mut() {
            for &(a, b) in &pairs {
                let row = log.open(a, b, EdgeKind::OneTime, day);
                log.rows[row].dissolved_day = Some(day + 1);
            }
        }
        self.onetime = pairs;
    }

    fn mark_day(&mut self, day: Day) {
        if let Some(log) = self.log.as_mut() {
            log.last_day = day;
        }
    }
}

/// Per-kind accounting of rewiring delays.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RewiringStats {
    /// Wait-list entries created by dissolutions.
    pub enqueued: u64,
    /// Entries not re-paired on the day they were created.
    pub delayed: u64,
}

impl RewiringStats {
    pub fn percent_delayed(&self) -> Option<f64> {
        (self.enqueued > 0).then(|| 100.0 * self.delayed as f64 / self.enqueued as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WaitEntry {
    pub node: NodeId,
    pub since: Day,
}

#[derive(Clone, Debug)]
pub struct RewiringState {
    pub want_main: Vec<WaitEntry>,
    pub want_casual: Vec<WaitEntry>,
    pub last_partner_main: Vec<Option<NodeId>>,
    pub last_partner_casual: Vec<Option<NodeId>>,
    pub main: RewiringStats,
    pub casual: RewiringStats,
}

impl RewiringState {
    pub fn new(n: usize) -> Self {
        Self {
            want_main: Vec::new(),
            want_casual: Vec::new(),
            last_partner_main: vec![None; n],
            last_partner_casual: vec![None; n],
            main: RewiringStats::default(),
            casual: RewiringStats::default(),
        }
    }

    pub fn stats(&self, kind: EdgeKind) -> RewiringStats {
        match kind {
            EdgeKind::Main => self.main,
            EdgeKind::Casual => self.casual,
            EdgeKind::OneTime => RewiringStats::default(),
        }
    }

    fn parts(
        &mut self,
        kind: EdgeKind,
    ) -> (&mut Vec<WaitEntry>, &mut Vec<Option<NodeId>>, &mut RewiringStats) {
        match kind {
            EdgeKind::Main => (&mut self.want_main, &mut self.last_partner_main, &mut self.main),
            EdgeKind::Casual => (
                &mut self.want_casual,
                &mut self.last_partner_casual,
                &mut self.casual,
            ),
            EdgeKind::OneTime => unreachable!("one-time edges are never rewired"),
        }
    }
}

/// Pairs consecutive stubs of a shuffled list. A self-loop, a pair formed
/// earlier in this call, or a pair rejected by `blocked` is repaired by
/// swapping the second stub with a random later one; failing that, by
/// splicing into an already formed pair. Stubs that cannot be placed are
/// returned in `leftover`.
fn pair_stubs(
    stubs: &mut [NodeId],
    rng: &mut RngStream,
    blocked: impl Fn(NodeId, NodeId) -> bool,
    out: &mut Vec<(NodeId, NodeId)>,
    leftover: &mut Vec<NodeId>,
) {
    let len = stubs.len();
    let mut formed: HashSet<u64> = HashSet::with_capacity(len / 2);
    let valid = |formed: &HashSet<u64>, a: NodeId, b: NodeId| {
        a != b && !formed.contains(&pair_key(a, b)) && !blocked(a, b)
    };
    let mut i = 0;
    while i + 1 < len {
        let u = stubs[i];
        let mut ok = valid(&formed, u, stubs[i + 1]);
        let mut tries = 0;
        while !ok && i + 2 < len && tries < MAX_REPAIR_ATTEMPTS {
            let j = i + 2 + rng.index(len - i - 2);
            stubs.swap(i + 1, j);
            ok = valid(&formed, u, stubs[i + 1]);
            tries += 1;
        }
        let v = stubs[i + 1];
        if ok {
            formed.insert(pair_key(u, v));
            out.push((u, v));
        } else {
            let mut spliced = false;
            for _ in 0..MAX_REPAIR_ATTEMPTS {
                if out.is_empty() {
                    break;
                }
                let k = rng.index(out.len());
                let (a, b) = out[k];
                formed.remove(&pair_key(a, b));
                if valid(&formed, u, a) && valid(&formed, v, b) && pair_key(u, a) != pair_key(v, b) {
                    formed.insert(pair_key(u, a));
                    formed.insert(pair_key(v, b));
                    out[k] = (u, a);
                    out.push((v, b));
                    spliced = true;
                    break;
                }
                formed.insert(pair_key(a, b));
            }
            if !spliced {
                leftover.push(u);
                leftover.push(v);
            }
        }
        i += 2;
    }
    if len % 2 == 1 {
        leftover.push(stubs[len - 1]);
    }
}

/// Persistent-edge duration samplers.
#[derive(Clone, Copy, Debug)]
pub struct DurationModel {
    pub main: DurationGeometric,
    pub casual: DurationGeometric,
}

impl DurationModel {
    pub fn new(params: &NetworkParams) -> Result<Self> {
        Ok(Self {
            main: DurationGeometric::new(params.main_mean_days)?,
            casual: DurationGeometric::new(params.casual_mean_days)?,
        })
    }

    fn sample(&self, kind: EdgeKind, rng: &mut RngStream) -> u32 {
        match kind {
            EdgeKind::Main => self.main.sample(rng),
            EdgeKind::Casual => self.casual.sample(rng),
            EdgeKind::OneTime => 1,
        }
    }
}

/// Builds day-0 partnerships by shuffling and pairing the stub lists of each
/// kind: one-time first, then main, then casual.
pub fn init_relationships(
    pop: &Population,
    durations: &DurationModel,
    record_log: bool,
    rng: &mut RngStream,
) -> (PartnershipSet, RewiringState) {
    let n = pop.len();
    let mut set = PartnershipSet::new(record_log);
    let mut rewiring = RewiringState::new(n);

    let mut stubs: Vec<NodeId> = Vec::new();
    for (id, &k) in pop.initial_onetime.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(id as NodeId, k as usize));
    }
    stubs.shuffle(rng);
    let mut pairs = Vec::with_capacity(stubs.len() / 2);
    let mut leftover = Vec::new();
    pair_stubs(&mut stubs, rng, |_, _| false, &mut pairs, &mut leftover);
    set.set_onetime(pairs, 0);

    for kind in [EdgeKind::Main, EdgeKind::Casual] {
        stubs.clear();
        for node in pop.nodes() {
            let target = match kind {
                EdgeKind::Main => node.rel_class.main_target(),
                _ => node.rel_class.casual_target(),
            };
            stubs.extend(std::iter::repeat_n(node.id, target as usize));
        }
        stubs.shuffle(rng);
        let mut pairs = Vec::with_capacity(stubs.len() / 2);
        let mut leftover = Vec::new();
        pair_stubs(&mut stubs, rng, |_, _| false, &mut pairs, &mut leftover);
        for (a, b) in pairs {
            let d = durations.sample(kind, rng);
            set.add_persistent(a, b, kind, d, 0);
        }
        let (queue, _, _) = rewiring.parts(kind);
        queue.extend(leftover.into_iter().map(|node| WaitEntry { node, since: 0 }));
    }
    set.mark_day(0);
    (set, rewiring)
}

/// Replaces yesterday's one-time edges with a fresh draw: per-node counts are
/// redrawn wholesale until their total is even, then stubs are shuffled and
/// paired.
pub fn update_onetime(pop: &Population, set: &mut PartnershipSet, day: Day, rng: &mut RngStream) {
    let mut counts = std::mem::take(&mut set.counts);
    loop {
        pop.draw_onetime_counts(rng, &mut counts);
        let total: u64 = counts.iter().map(|&k| k as u64).sum();
        if total % 2 == 0 {
            break;
        }
    }
    let mut stubs = std::mem::take(&mut set.stubs);
    stubs.clear();
    for (id, &k) in counts.iter().enumerate() {
        for _ in 0..k {
            stubs.push(id as NodeId);
        }
    }
    stubs.shuffle(rng);
    let mut pairs = Vec::with_capacity(stubs.len() / 2);
    let mut leftover = Vec::new();
    pair_stubs(&mut stubs, rng, |_, _| false, &mut pairs, &mut leftover);
    set.set_onetime(pairs, day);
    set.counts = counts;
    set.stubs = stubs;
}

/// Ages persistent edges by one day, dissolves those that reach zero, and
/// re-pairs the wait-lists.
pub fn update_persistent(
    set: &mut PartnershipSet,
    rewiring: &mut RewiringState,
    durations: &DurationModel,
    day: Day,
    rng: &mut RngStream,
) {
    let mut expired = Vec::new();
    set.persistent.retain_mut(|e| {
        e.remaining_days = e.remaining_days.saturating_sub(1);
        if e.remaining_days == 0 {
            expired.push(e.clone());
            false
        } else {
            true
        }
    });
    for e in expired {
        set.live_set(e.kind).remove(&pair_key(e.a, e.b));
        if let (Some(log), Some(row)) = (set.log.as_mut(), e.log_row) {
            log.close(row, day);
        }
        let (queue, last, stats) = rewiring.parts(e.kind);
        queue.push(WaitEntry { node: e.a, since: day });
        queue.push(WaitEntry { node: e.b, since: day });
        last[e.a as usize] = Some(e.b);
        last[e.b as usize] = Some(e.a);
        stats.enqueued += 2;
    }

    for kind in [EdgeKind::Main, EdgeKind::Casual] {
        let (waiting, last, live) = match kind {
            EdgeKind::Main => (
                std::mem::take(&mut rewiring.want_main),
                &rewiring.last_partner_main,
                &set.live_main,
            ),
            _ => (
                std::mem::take(&mut rewiring.want_casual),
                &rewiring.last_partner_casual,
                &set.live_casual,
            ),
        };
        let (pairs, remaining) = pair_wait_list(&waiting, last, live);
        for (x, y) in pairs {
            let d = durations.sample(kind, rng);
            set.add_persistent(x, y, kind, d, day);
        }
        let (queue, _, stats) = rewiring.parts(kind);
        stats.delayed += remaining.iter().filter(|w| w.since == day && day > 0).count() as u64;
        *queue = remaining;
    }
    set.mark_day(day);
}

/// First-in-first-out scan: each waiting node takes the earliest later entry
/// that is neither itself, its most recent partner, nor an existing partner.
fn pair_wait_list(
    waiting: &[WaitEntry],
    last: &[Option<NodeId>],
    live: &HashSet<u64>,
) -> (Vec<(NodeId, NodeId)>, Vec<WaitEntry>) {
    let mut used = vec![false; waiting.len()];
    let mut pairs = Vec::new();
    let mut formed: HashSet<u64> = HashSet::new();
    let mut remaining = Vec::new();
    let allowed = |x: NodeId, y: NodeId, formed: &HashSet<u64>| {
        x != y
            && last[x as usize] != Some(y)
            && last[y as usize] != Some(x)
            && !live.contains(&pair_key(x, y))
            && !formed.contains(&pair_key(x, y))
    };
    for i in 0..waiting.len() {
        if used[i] {
            continue;
        }
        let x = waiting[i].node;
        let partner = (i + 1..waiting.len()).find(|&j| !used[j] && allowed(x, waiting[j].node, &formed));
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
                let y = waiting[j].node;
                formed.insert(pair_key(x, y));
                pairs.push((x, y));
            }
            None => remaining.push(waiting[i]),
        }
    }

    // Two leftovers that exclude each other (typically a pair that just
    // split) can still both be placed by trading partners with a pair formed
    // earlier in this scan.
    let mut stuck = vec![true; remaining.len()];
    for i in 0..remaining.len() {
        for j in i + 1..remaining.len() {
            if !stuck[i] || !stuck[j] {
                continue;
            }
            let (x, y) = (remaining[i].node, remaining[j].node);
            let swap = pairs.iter().enumerate().find_map(|(k, &(a, b))| {
                if a == x || a == y || b == x || b == y {
                    None
                } else if allowed(x, a, &formed) && allowed(y, b, &formed) {
                    Some((k, (x, a), (y, b)))
                } else if allowed(x, b, &formed) && allowed(y, a, &formed) {
                    Some((k, (x, b), (y, a)))
                } else {
                    None
                }
            });
            if let Some((k, p, q)) = swap {
                formed.remove(&pair_key(pairs[k].0, pairs[k].1));
                formed.insert(pair_key(p.0, p.1));
                formed.insert(pair_key(q.0, q.1));
                pairs[k] = p;
                pairs.push(q);
                stuck[i] = false;
                stuck[j] = false;
            }
        }
    }
    let remaining = remaining.into_iter().zip(stuck).filter(|(_, s)| *s).map(|(e, _)| e).collect();
    (pairs, remaining)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::population::{create_population, NodeProfile, RelClass, Stratum};

    fn fixed_population(classes: &[(u8, u8)], p: f64) -> Population {
        let nodes = classes
            .iter()
            .enumerate()
            .map(|(id, &(m, c))| NodeProfile {
                id: id as NodeId,
                rel_class: RelClass::from_targets(m, c).unwrap(),
                stratum: Stratum::new(1).unwrap(),
                p_onetime: p,
                p_onetime_base: p,
            })
            .collect();
        Population::from_profiles(nodes, vec![0; classes.len()]).unwrap()
    }

    #[test]
    fn pair_stubs_repairs_self_loops() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..200 {
            let mut stubs = vec![0, 0, 1, 1, 2, 2, 3, 3];
            stubs.shuffle(&mut rng);
            let mut out = Vec::new();
            let mut left = Vec::new();
            pair_stubs(&mut stubs, &mut rng, |_, _| false, &mut out, &mut left);
            let keys: HashSet<u64> = out.iter().map(|&(a, b)| pair_key(a, b)).collect();
            assert_eq!(keys.len(), out.len());
            assert!(out.iter().all(|(a, b)| a != b));
            assert_eq!(out.len() * 2 + left.len(), 8);
            let mut deg = [0; 4];
            for &(a, b) in &out {
                deg[a as usize] += 1;
                deg[b as usize] += 1;
            }
            for &x in &left {
                deg[x as usize] += 1;
            }
            assert_eq!(deg, [2; 4]);
        }
    }

    #[test]
    fn nobody_wants_partners() {
        let pop = fixed_population(&[(0, 0); 10], 0.0);
        let durations = DurationModel::new(&NetworkParams::default()).unwrap();
        let mut rng = RngStream::new(2, 0);
        let (mut set, mut rw) = init_relationships(&pop, &durations, true, &mut rng);
        assert_eq!(set.live_edges().count(), 0);
        update_onetime(&pop, &mut set, 1, &mut rng);
        update_persistent(&mut set, &mut rw, &durations, 1, &mut rng);
        assert_eq!(set.live_edges().count(), 0);
    }

    #[test]
    fn exclusion_forces_cross_pairing() {
        // two main pairs (0,1), (2,3) dissolving the same day
        let durations = DurationModel::new(&NetworkParams::default()).unwrap();
        for seed in 0..50 {
            let mut rng = RngStream::new(seed, 0);
            let mut set = PartnershipSet::new(false);
            let mut rw = RewiringState::new(4);
            set.add_persistent(0, 1, EdgeKind::Main, 1, 0);
            set.add_persistent(2, 3, EdgeKind::Main, 1, 0);
            update_persistent(&mut set, &mut rw, &durations, 1, &mut rng);
            let mut keys: Vec<u64> = set.persistent().iter().map(|e| pair_key(e.a, e.b)).collect();
            keys.sort();
            assert_eq!(keys.len(), 2);
            assert!(!keys.contains(&pair_key(0, 1)));
            assert!(!keys.contains(&pair_key(2, 3)));
            assert!(rw.want_main.is_empty());
            assert_eq!(rw.main, RewiringStats { enqueued: 4, delayed: 0 });
        }
    }

    #[test]
    fn lone_dissolution_waits() {
        let pop = fixed_population(&[(1, 0); 2], 0.0);
        let durations = DurationModel::new(&NetworkParams::default()).unwrap();
        let mut rng = RngStream::new(3, 0);
        let mut set = PartnershipSet::new(false);
        let mut rw = RewiringState::new(pop.len());
        set.add_persistent(0, 1, EdgeKind::Main, 1, 0);
        update_persistent(&mut set, &mut rw, &durations, 1, &mut rng);
        assert_eq!(set.count(EdgeKind::Main), 0);
        assert_eq!(rw.want_main.len(), 2);
        assert_eq!(rw.main, RewiringStats { enqueued: 2, delayed: 2 });
        // still waiting the next day, but counted only once
        update_persistent(&mut set, &mut rw, &durations, 2, &mut rng);
        assert_eq!(rw.main.delayed, 2);
        assert_eq!(rw.main.percent_delayed(), Some(100.0));
    }

    #[test]
    fn waiting_nodes_pair_with_later_dissolutions() {
        let pop = fixed_population(&[(1, 0); 4], 0.0);
        let durations = DurationModel::new(&NetworkParams::default()).unwrap();
        let mut rng = RngStream::new(4, 0);
        let mut set = PartnershipSet::new(false);
        let mut rw = RewiringState::new(pop.len());
        set.add_persistent(0, 1, EdgeKind::Main, 1, 0);
        set.add_persistent(2, 3, EdgeKind::Main, 2, 0);
        update_persistent(&mut set, &mut rw, &durations, 1, &mut rng);
        update_persistent(&mut set, &mut rw, &durations, 2, &mut rng);
        assert_eq!(set.count(EdgeKind::Main), 2);
        assert!(rw.want_main.is_empty());
        assert_eq!(rw.main, RewiringStats { enqueued: 4, delayed: 2 });
    }

    #[test]
    fn casual_rewiring_avoids_duplicates() {
        // 0 keeps a live casual edge with 1 while both lose another partner
        let pop = fixed_population(&[(0, 2), (0, 2), (0, 1), (0, 1)], 0.0);
        let durations = DurationModel::new(&NetworkParams::default()).unwrap();
        let mut rng = RngStream::new(5, 0);
        let mut set = PartnershipSet::new(false);
        let mut rw = RewiringState::new(pop.len());
        set.add_persistent(0, 1, EdgeKind::Casual, 100, 0);
        set.add_persistent(0, 2, EdgeKind::Casual, 1, 0);
        set.add_persistent(1, 3, EdgeKind::Casual, 1, 0);
        update_persistent(&mut set, &mut rw, &durations, 1, &mut rng);
        // 0-1 already exists, 0-2 and 1-3 are excluded: 0-3 and 1-2 remain
        assert!(set.is_live(0, 3, EdgeKind::Casual));
        assert!(set.is_live(1, 2, EdgeKind::Casual));
        assert_eq!(set.count(EdgeKind::Casual), 3);
    }

    #[test]
    fn main_edge_count_matches_stub_expectation() {
        // (0.22 + 0.047 + 0.021) * 10_000 / 2 = 1440
        let params = NetworkParams::default();
        let durations = DurationModel::new(&params).unwrap();
        let mut rng = RngStream::new(6, 0);
        let pop = create_population(10_000, &params, &mut rng).unwrap();
        let (set, rw) = init_relationships(&pop, &durations, false, &mut rng);
        let main = set.count(EdgeKind::Main) as i64;
        assert!((main - 1440).abs() <= 60, "{main}");
        // brute-force recount of the degree sequence
        let stubs: u64 = pop.nodes().iter().map(|n| n.rel_class.main_target() as u64).sum();
        assert_eq!(main as u64 * 2 + rw.want_main.len() as u64, stubs);
        let deg = set.degrees(pop.len(), EdgeKind::Main);
        for node in pop.nodes() {
            assert!(deg[node.id as usize] <= node.rel_class.main_target() as u32);
        }
    }

    #[test]
    fn initial_main_durations_average_407() {
        let params = NetworkParams::default();
        let durations = DurationModel::new(&params).unwrap();
        let mut total = 0u64;
        let mut count = 0u64;
        for seed in 0..50 {
            let mut rng = RngStream::new(seed, 9);
            let pop = create_population(10_000, &params, &mut rng).unwrap();
            let (set, _) = init_relationships(&pop, &durations, false, &mut rng);
            for e in set.persistent().iter().filter(|e| e.kind == EdgeKind::Main) {
                total += e.remaining_days as u64;
                count += 1;
            }
        }
        let mean = total as f64 / count as f64;
        assert!((mean - 407.0).abs() <= 10.0, "{mean}");
    }

    #[test]
    fn zero_propensity_yields_no_onetime_edges() {
        let pop = fixed_population(&[(0, 0); 50], 0.0);
        let mut rng = RngStream::new(7, 0);
        let mut set = PartnershipSet::new(false);
        update_onetime(&pop, &mut set, 1, &mut rng);
        assert!(set.onetime().is_empty());
    }

    #[test]
    fn daily_onetime_volume() {
        // sum of p/(1-p) over strata weights, times N/2
        let strata = [0.0, 0.001, 0.0054, 0.0101, 0.0315, 0.286];
        let weights = [0.19, 0.19, 0.19, 0.19, 0.19, 0.05];
        let expected: f64 = strata
            .iter()
            .zip(weights)
            .map(|(p, w)| w * p / (1.0 - p))
            .sum::<f64>()
            * 10_000.0
            / 2.0;
        assert!((expected - 146.0).abs() < 2.0, "{expected}");

        let params = NetworkParams::default();
        let mut rng = RngStream::new(8, 0);
        let pop = create_population(10_000, &params, &mut rng).unwrap();
        let mut set = PartnershipSet::new(false);
        let days = 200;
        let mut total = 0usize;
        for day in 1..=days {
            update_onetime(&pop, &mut set, day, &mut rng);
            total += set.onetime().len();
        }
        let mean = total as f64 / days as f64;
        assert!((mean - 146.0).abs() <= 15.0, "{mean}");
    }

    #[test]
    fn high_propensity_node_daily_partners() {
        // per-node daily partner count, averaged over 200 identical nodes
        let n = 200;
        let nodes = (0..n)
            .map(|id| NodeProfile {
                id: id as NodeId,
                rel_class: RelClass::new(0).unwrap(),
                stratum: Stratum::new(6).unwrap(),
                p_onetime: 0.286,
                p_onetime_base: 0.286,
            })
            .collect();
        let pop = Population::from_profiles(nodes, vec![0; n]).unwrap();
        let mut rng = RngStream::new(9, 0);
        let mut set = PartnershipSet::new(false);
        let days = 250;
        let mut endpoints = 0usize;
        for day in 1..=days {
            update_onetime(&pop, &mut set, day, &mut rng);
            endpoints += 2 * set.onetime().len();
        }
        let mean = endpoints as f64 / (days as f64 * n as f64);
        assert!((mean - 0.4006).abs() < 0.03, "{mean}");
    }
}
