//! Exact pure-state engine over a register of polarization qubits.
//!
//! Basis strings are big-endian in creation order: the oldest present photon
//! is the most significant bit. Loss is an environment measurement in the
//! computational basis whose result is kept in a hidden log that protocol
//! code never sees.

use std::collections::VecDeque;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::rng::{Lane, Stream};

/// Hard limit on simultaneously present photons (2^24 amplitudes).
pub const MAX_PRESENT: usize = 24;

const PROB_EPS: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhotonId(pub u32);

impl fmt::Display for PhotonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Present,
    Lost,
    Measured,
}

/// Old photons have waited in memory; new ones come straight from a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Age {
    Old,
    New,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    C,
    D,
}

/// Where a photon sat when it was created. Protocols track live block
/// membership themselves; the tag is for logs and debugging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Code { block: usize, index: usize },
    Resource { block: usize, index: usize },
    Port(Port),
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub id: PhotonId,
    pub status: Status,
    pub tag: Tag,
    pub age: Age,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Computational,
    /// `|+>` reads as 0, `|->` as 1.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub photon: PhotonId,
    pub basis: Basis,
    pub bit: u8,
    pub hidden: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionOutcome {
    /// Projection onto `|00> + sign |11>`.
    Success { sign: i8 },
    /// Projection onto `|b1 b2>` with `b1 != b2`.
    Failure { bits: (u8, u8) },
    /// At least one input was missing; `photons_seen` of them reached a detector.
    LossDetected { photons_seen: u8 },
}

impl FusionOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, FusionOutcome::Success { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinOutcome {
    pub success: bool,
    /// Photons of the joined block on success, empty on failure.
    pub merged: Vec<PhotonId>,
}

pub type Unitary = [[C64; 2]; 2];

/// Common single-photon gates.
pub mod gate {
    use super::Unitary;
    use num_complex::Complex64 as C64;
    use std::f64::consts::FRAC_1_SQRT_2;

    const O: C64 = C64::new(0.0, 0.0);
    const I: C64 = C64::new(1.0, 0.0);

    pub fn identity() -> Unitary {
        [[I, O], [O, I]]
    }
    pub fn x() -> Unitary {
        [[O, I], [I, O]]
    }
    pub fn z() -> Unitary {
        [[I, O], [O, -I]]
    }
    pub fn h() -> Unitary {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        [[s, s], [s, -s]]
    }
    /// `diag(1, e^{i theta})`.
    pub fn z_theta(theta: f64) -> Unitary {
        [[I, O], [O, C64::from_polar(1.0, theta)]]
    }
    /// `cos(theta/2) I - i sin(theta/2) X`; `x_theta(pi/2)` is `(I - iX)/sqrt 2`.
    pub fn x_theta(theta: f64) -> Unitary {
        let c = C64::new((theta / 2.0).cos(), 0.0);
        let s = C64::new(0.0, -(theta / 2.0).sin());
        [[c, s], [s, c]]
    }
}

/// Scripted outcome for the next fusion (or type-I join).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionChoice {
    Any,
    Success,
    Failure,
    Sign(i8),
    Bits(u8, u8),
}

/// Outcome forcing for tests. Fusion choices are hard: forcing an outcome of
/// zero probability is an error. Measurement and hidden-value preferences are
/// soft: an impossible preference falls back to the only possible value.
/// Empty queues fall back to the default, then to Born sampling.
#[derive(Debug, Clone, Default)]
pub struct Script {
    pub fusion: VecDeque<FusionChoice>,
    pub measure: VecDeque<u8>,
    pub measure_default: Option<u8>,
    pub hidden: VecDeque<u8>,
    pub hidden_default: Option<u8>,
}

impl Script {
    pub fn fusions(choices: impl IntoIterator<Item = FusionChoice>) -> Self {
        Script {
            fusion: choices.into_iter().collect(),
            ..Script::default()
        }
    }

    pub fn with_hidden(mut self, bit: u8) -> Self {
        self.hidden_default = Some(bit);
        self
    }

    pub fn with_measure_default(mut self, bit: u8) -> Self {
        self.measure_default = Some(bit);
        self
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    slots: Vec<Slot>,
    order: Vec<PhotonId>,
    amps: Vec<C64>,
    born: Stream,
    script: Script,
    hidden_log: Vec<MeasurementRecord>,
    capacity: usize,
}

impl Engine {
    pub fn new(master_seed: u64, run: u64) -> Self {
        Engine {
            slots: Vec::new(),
            order: Vec::new(),
            amps: vec![C64::new(1.0, 0.0)],
            born: Stream::new(master_seed, run, Lane::Born),
            script: Script::default(),
            hidden_log: Vec::new(),
            capacity: MAX_PRESENT,
        }
    }

    pub fn with_capacity(mut self, limit: usize) -> Self {
        self.capacity = limit.min(MAX_PRESENT);
        self
    }

    pub fn set_script(&mut self, script: Script) {
        self.script = script;
    }

    pub fn script_mut(&mut self) -> &mut Script {
        &mut self.script
    }

    /// Appends `amps` (over `tags.len()` new photons) as a tensor factor.
    pub fn add_state(&mut self, tags: &[Tag], age: Age, amps: Vec<C64>) -> Result<Vec<PhotonId>> {
        let k = tags.len();
        if amps.len() != 1usize << k {
            return Err(Error::Precondition(format!(
                "{} amplitudes for {} photons",
                amps.len(),
                k
            )));
        }
        let norm = norm_sqr(&amps).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let requested = self.order.len() + k;
        if requested > self.capacity {
            return Err(Error::Capacity {
                requested,
                limit: self.capacity,
            });
        }
        let mut next = Vec::with_capacity(self.amps.len() << k);
        for a in &self.amps {
            next.extend(amps.iter().map(|b| a * b));
        }
        self.amps = next;
        let mut ids = Vec::with_capacity(k);
        for &tag in tags {
            let id = PhotonId(self.slots.len() as u32);
            self.slots.push(Slot {
                id,
                status: Status::Present,
                tag,
                age,
            });
            self.order.push(id);
            ids.push(id);
        }
        Ok(ids)
    }

    pub fn slot(&self, id: PhotonId) -> Result<&Slot> {
        self.slots.get(id.0 as usize).ok_or(Error::UnknownPhoton(id))
    }

    pub fn status(&self, id: PhotonId) -> Result<Status> {
        Ok(self.slot(id)?.status)
    }

    pub fn age(&self, id: PhotonId) -> Result<Age> {
        Ok(self.slot(id)?.age)
    }

    /// Marks every present photon as `age`.
    pub fn age_all(&mut self, age: Age) {
        for s in self.slots.iter_mut().filter(|s| s.status == Status::Present) {
            s.age = age;
        }
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Present photons in qubit order.
    pub fn present(&self) -> &[PhotonId] {
        &self.order
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// Loss-channel results. Only test code should read these.
    #[doc(hidden)]
    pub fn hidden_log(&self) -> &[MeasurementRecord] {
        &self.hidden_log
    }

    fn position(&self, id: PhotonId) -> Result<usize> {
        match self.slot(id)?.status {
            Status::Lost => Err(Error::PhotonLost(id)),
            Status::Measured => Err(Error::PhotonMeasured(id)),
            Status::Present => Ok(self
                .order
                .iter()
                .position(|&p| p == id)
                .expect("present photon is ordered")),
        }
    }

    fn bitpos(&self, pos: usize) -> usize {
        self.order.len() - 1 - pos
    }

    pub fn apply_1q(&mut self, id: PhotonId, u: &Unitary) -> Result<()> {
        let dev = unitarity_defect(u);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        let pos = self.position(id)?;
        let bit = self.bitpos(pos);
        apply_at(&mut self.amps, bit, u);
        Ok(())
    }

    pub fn measure(&mut self, id: PhotonId, basis: Basis) -> Result<MeasurementRecord> {
        let pos = self.position(id)?;
        if basis == Basis::Diagonal {
            let bit = self.bitpos(pos);
            apply_at(&mut self.amps, bit, &gate::h());
        }
        let forced = self.script.measure.pop_front().or(self.script.measure_default);
        let bit = self.collapse(pos, forced);
        self.slots[id.0 as usize].status = Status::Measured;
        Ok(MeasurementRecord {
            photon: id,
            basis,
            bit,
            hidden: false,
        })
    }

    /// Environment takes the photon: a hidden computational measurement.
    pub fn lose(&mut self, id: PhotonId) -> Result<()> {
        self.hidden_measure(id, Status::Lost)
    }

    fn hidden_measure(&mut self, id: PhotonId, status: Status) -> Result<()> {
        let pos = self.position(id)?;
        let forced = self.script.hidden.pop_front().or(self.script.hidden_default);
        let bit = self.collapse(pos, forced);
        self.slots[id.0 as usize].status = status;
        self.hidden_log.push(MeasurementRecord {
            photon: id,
            basis: Basis::Computational,
            bit,
            hidden: true,
        });
        Ok(())
    }

    /// Removes a photon that is known to be unentangled, or whose result no
    /// one cares about, by measuring it computationally.
    pub fn discard(&mut self, id: PhotonId) -> Result<MeasurementRecord> {
        let pos = self.position(id)?;
        let bit = self.collapse(pos, None);
        self.slots[id.0 as usize].status = Status::Measured;
        Ok(MeasurementRecord {
            photon: id,
            basis: Basis::Computational,
            bit,
            hidden: false,
        })
    }

    /// Complete projective measurement `{Phi+, Phi-, |01>, |10>}` on a pair.
    pub fn fusion_type_ii(&mut self, a: PhotonId, b: PhotonId) -> Result<FusionOutcome> {
        if a == b {
            return Err(Error::SamePhoton(a));
        }
        let sa = self.status(a)?;
        let sb = self.status(b)?;
        for (id, s) in [(a, sa), (b, sb)] {
            if s == Status::Measured {
                return Err(Error::PhotonMeasured(id));
            }
        }
        if sa == Status::Lost || sb == Status::Lost {
            let mut seen = 0;
            for (id, s) in [(a, sa), (b, sb)] {
                if s == Status::Present {
                    seen += 1;
                    self.hidden_measure(id, Status::Measured)?;
                }
            }
            return Ok(FusionOutcome::LossDetected { photons_seen: seen });
        }
        let pa = self.position(a)?;
        let pb = self.position(b)?;
        let (ba, bb) = (self.bitpos(pa), self.bitpos(pb));
        let rest = self.amps.len() >> 2;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut parts: [Vec<C64>; 4] = std::array::from_fn(|_| Vec::with_capacity(rest));
        for i in 0..rest {
            let at = |x: usize, y: usize| self.amps[insert2(i, ba, x, bb, y)];
            let (a00, a11) = (at(0, 0), at(1, 1));
            parts[0].push((a00 + a11) * r);
            parts[1].push((a00 - a11) * r);
            parts[2].push(at(0, 1));
            parts[3].push(at(1, 0));
        }
        let probs: Vec<f64> = parts.iter().map(|p| norm_sqr(p)).collect();
        let choice = self.script.fusion.pop_front().unwrap_or(FusionChoice::Any);
        let allowed: [bool; 4] = match choice {
            FusionChoice::Any => [true; 4],
            FusionChoice::Success => [true, true, false, false],
            FusionChoice::Failure => [false, false, true, true],
            FusionChoice::Sign(s) => [s > 0, s < 0, false, false],
            FusionChoice::Bits(0, 1) => [false, false, true, false],
            FusionChoice::Bits(1, 0) => [false, false, false, true],
            FusionChoice::Bits(..) => [false; 4],
        };
        let k = self.sample_restricted(&probs, &allowed, choice)?;
        let [p0, p1, p2, p3] = parts;
        self.amps = [p0, p1, p2, p3].into_iter().nth(k).expect("four branches");
        normalize(&mut self.amps);
        self.remove_ordered(&[a, b]);
        Ok(match k {
            0 => FusionOutcome::Success { sign: 1 },
            1 => FusionOutcome::Success { sign: -1 },
            2 => FusionOutcome::Failure { bits: (0, 1) },
            _ => FusionOutcome::Failure { bits: (1, 0) },
        })
    }

    /// Type-I fusion with Hadamards joining two `|0>` parity blocks. Fuses
    /// the last photon of `block_a` with the first of `block_b`; on success
    /// the first photon survives and the blocks merge. Failure destroys both.
    pub fn fusion_type_i_join(&mut self, block_a: &[PhotonId], block_b: &[PhotonId]) -> Result<JoinOutcome> {
        if let Some(&p) = block_a.iter().find(|p| block_b.contains(p)) {
            return Err(Error::Overlap(p));
        }
        let (&a, &b) = match (block_a.last(), block_b.first()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Precondition("empty block in join".into())),
        };
        for &p in block_a.iter().chain(block_b) {
            self.position(p)?;
        }
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        let (ba, bb) = (self.bitpos(pa), self.bitpos(pb));
        apply_at(&mut self.amps, ba, &gate::h());
        apply_at(&mut self.amps, bb, &gate::h());
        let rest = self.amps.len() >> 2;
        let mut same = vec![C64::new(0.0, 0.0); rest * 2];
        let mut p_diff = 0.0;
        for i in 0..rest {
            for x in 0..2 {
                let v = self.amps[insert2(i, ba, x, bb, x)];
                // keep `a` in place of the pair: index over k-1 qubits
                same[insert1(i, join_bitpos(ba, bb), x)] = v;
                p_diff += self.amps[insert2(i, ba, x, bb, 1 - x)].norm_sqr();
            }
        }
        let p_same = norm_sqr(&same);
        let choice = self.script.fusion.pop_front().unwrap_or(FusionChoice::Any);
        let allowed = match choice {
            FusionChoice::Success | FusionChoice::Sign(_) => [true, false],
            FusionChoice::Failure | FusionChoice::Bits(..) => [false, true],
            FusionChoice::Any => [true, true],
        };
        let k = self.sample_restricted(&[p_same, p_diff], &allowed, choice)?;
        if k == 0 {
            self.amps = same;
            normalize(&mut self.amps);
            self.remove_ordered(&[b]);
            let pa = self.position(a)?;
            let bit = self.bitpos(pa);
            apply_at(&mut self.amps, bit, &gate::h());
            let merged = block_a.iter().chain(&block_b[1..]).copied().collect();
            Ok(JoinOutcome {
                success: true,
                merged,
            })
        } else {
            let pa = self.position(a)?;
            let bit = self.bitpos(pa);
            apply_at(&mut self.amps, bit, &gate::h());
            let pb = self.position(b)?;
            let bit = self.bitpos(pb);
            apply_at(&mut self.amps, bit, &gate::h());
            for &p in block_a.iter().chain(block_b) {
                self.discard(p)?;
            }
            Ok(JoinOutcome {
                success: false,
                merged: Vec::new(),
            })
        }
    }

    /// Amplitudes with qubits reordered to `order`, which must list every
    /// present photon exactly once.
    pub fn amplitudes_in(&self, order: &[PhotonId]) -> Result<Vec<C64>> {
        if order.len() != self.order.len() {
            return Err(Error::Precondition(format!(
                "order lists {} photons, {} present",
                order.len(),
                self.order.len()
            )));
        }
        let k = order.len();
        let mut src_bit = Vec::with_capacity(k);
        for (i, &id) in order.iter().enumerate() {
            if order[..i].contains(&id) {
                return Err(Error::Overlap(id));
            }
            src_bit.push(self.bitpos(self.position(id)?));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut src = 0usize;
            for (i, &sb) in src_bit.iter().enumerate() {
                if (j >> (k - 1 - i)) & 1 == 1 {
                    src |= 1 << sb;
                }
            }
            *slot = self.amps[src];
        }
        Ok(out)
    }

    fn sample_restricted(&mut self, probs: &[f64], allowed: &[bool], choice: FusionChoice) -> Result<usize> {
        let total: f64 = probs.iter().zip(allowed).filter(|(_, &ok)| ok).map(|(p, _)| p).sum();
        if total <= PROB_EPS {
            return Err(Error::ImpossibleOutcome(format!("{choice:?}")));
        }
        let u = self.born.uniform() * total;
        let mut acc = 0.0;
        let mut last = 0;
        for (i, (&p, &ok)) in probs.iter().zip(allowed).enumerate() {
            if !ok || p <= 0.0 {
                continue;
            }
            acc += p;
            last = i;
            if u < acc {
                return Ok(i);
            }
        }
        Ok(last)
    }

    /// Computational collapse of the qubit at `pos`, removing it.
    fn collapse(&mut self, pos: usize, prefer: Option<u8>) -> u8 {
        let bp = self.bitpos(pos);
        let half = self.amps.len() >> 1;
        let mut p1 = 0.0;
        for i in 0..half {
            p1 += self.amps[insert1(i, bp, 1)].norm_sqr();
        }
        let p0 = (norm_sqr(&self.amps) - p1).max(0.0);
        let bit = match prefer {
            Some(v) if (if v == 0 { p0 } else { p1 }) > PROB_EPS => v,
            Some(v) => 1 - v,
            None => {
                if self.born.uniform() * (p0 + p1) < p0 {
                    0
                } else {
                    1
                }
            }
        };
        let mut next = Vec::with_capacity(half);
        for i in 0..half {
            next.push(self.amps[insert1(i, bp, bit as usize)]);
        }
        normalize(&mut next);
        self.amps = next;
        self.order.remove(pos);
        bit
    }

    fn remove_ordered(&mut self, ids: &[PhotonId]) {
        for id in ids {
            self.order.retain(|p| p != id);
            self.slots[id.0 as usize].status = Status::Measured;
        }
    }
}

/// Inserts `v` as bit `pos` of `x`.
fn insert1(x: usize, pos: usize, v: usize) -> usize {
    ((x >> pos) << (pos + 1)) | (v << pos) | (x & ((1 << pos) - 1))
}

fn insert2(x: usize, pa: usize, va: usize, pb: usize, vb: usize) -> usize {
    if pa < pb {
        insert1(insert1(x, pa, va), pb, vb)
    } else {
        insert1(insert1(x, pb, vb), pa, va)
    }
}

/// Bit position `a` occupies once `b` has been removed.
fn join_bitpos(a: usize, b: usize) -> usize {
    if b < a {
        a - 1
    } else {
        a
    }
}

fn apply_at(amps: &mut [C64], bp: usize, u: &Unitary) {
    let stride = 1usize << bp;
    for base in (0..amps.len()).step_by(stride << 1) {
        for i in base..base + stride {
            let (x0, x1) = (amps[i], amps[i + stride]);
            amps[i] = u[0][0] * x0 + u[0][1] * x1;
            amps[i + stride] = u[1][0] * x0 + u[1][1] * x1;
        }
    }
}

fn unitarity_defect(u: &Unitary) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let v = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn normalize(v: &mut [C64]) {
    let n = norm_sqr(v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|c| *c /= n);
    }
}

/// `<a|b>`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<a|b>|^2` for normalized vectors.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2 as R;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn engine_with(amps: Vec<C64>) -> (Engine, Vec<PhotonId>) {
        let mut e = Engine::new(1, 0);
        let k = amps.len().trailing_zeros() as usize;
        let ids = e.add_state(&vec![Tag::Bare; k], Age::Old, amps).unwrap();
        (e, ids)
    }

    fn close(a: &[C64], b: &[C64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn x_flips_zero() {
        let (mut e, ids) = engine_with(vec![c(1.0), c(0.0)]);
        e.apply_1q(ids[0], &gate::x()).unwrap();
        assert!(close(e.amplitudes(), &[c(0.0), c(1.0)]));
    }

    #[test]
    fn x_theta_zero_is_identity() {
        let v = vec![c(0.6), C64::new(0.0, 0.8)];
        let (mut e, ids) = engine_with(v.clone());
        e.apply_1q(ids[0], &gate::x_theta(0.0)).unwrap();
        assert!(close(e.amplitudes(), &v));
    }

    #[test]
    fn z_on_second_qubit_of_bell() {
        let (mut e, ids) = engine_with(vec![c(R), c(0.0), c(0.0), c(R)]);
        e.apply_1q(ids[1], &gate::z()).unwrap();
        assert!(close(e.amplitudes(), &[c(R), c(0.0), c(0.0), c(-R)]));
    }

    #[test]
    fn non_unitary_rejected() {
        let (mut e, ids) = engine_with(vec![c(1.0), c(0.0)]);
        let bad = [[c(1.0), c(1.0)], [c(0.0), c(1.0)]];
        assert!(matches!(e.apply_1q(ids[0], &bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn minus_reads_one_in_diagonal_basis() {
        for seed in 0..20 {
            let mut e = Engine::new(seed, 0);
            let ids = e.add_state(&[Tag::Bare], Age::Old, vec![c(R), c(-R)]).unwrap();
            assert_eq!(e.measure(ids[0], Basis::Diagonal).unwrap().bit, 1);
        }
    }

    #[test]
    fn measuring_one_photon_of_three_photon_parity_zero() {
        // |0>^(3) = (|000>+|011>+|101>+|110>)/2
        let mut v = vec![c(0.0); 8];
        for i in [0b000, 0b011, 0b101, 0b110] {
            v[i] = c(0.5);
        }
        let (mut e, ids) = engine_with(v);
        let r = e.measure(ids[0], Basis::Computational).unwrap();
        let expect = if r.bit == 0 {
            vec![c(R), c(0.0), c(0.0), c(R)]
        } else {
            vec![c(0.0), c(R), c(R), c(0.0)]
        };
        assert!(close(e.amplitudes(), &expect));
    }

    #[test]
    fn status_errors_distinguish_lost_and_measured() {
        let (mut e, ids) = engine_with(vec![c(0.5); 4]);
        e.lose(ids[0]).unwrap();
        e.measure(ids[1], Basis::Computational).unwrap();
        assert_eq!(e.measure(ids[0], Basis::Computational), Err(Error::PhotonLost(ids[0])));
        assert_eq!(e.measure(ids[1], Basis::Computational), Err(Error::PhotonMeasured(ids[1])));
        assert_eq!(e.present().len(), 0);
    }

    #[test]
    fn unentangled_loss_keeps_partner() {
        let (mut e, ids) = engine_with(vec![c(1.0), c(0.0), c(0.0), c(0.0)]);
        e.lose(ids[0]).unwrap();
        assert_eq!(e.hidden_log()[0].bit, 0);
        assert!(e.hidden_log()[0].hidden);
        assert!(close(e.amplitudes(), &[c(1.0), c(0.0)]));
    }

    #[test]
    fn bell_loss_collapses_partner_to_hidden_value() {
        for seed in 0..10 {
            let mut e = Engine::new(seed, 0);
            let ids = e.add_state(&[Tag::Bare; 2], Age::Old, vec![c(R), c(0.0), c(0.0), c(R)]).unwrap();
            e.lose(ids[0]).unwrap();
            let h = e.hidden_log()[0].bit;
            let r = e.measure(ids[1], Basis::Computational).unwrap();
            assert_eq!(r.bit, h);
        }
    }

    #[test]
    fn fusion_on_product_and_bell_inputs() {
        let (mut e, ids) = engine_with(vec![c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!(
            e.fusion_type_ii(ids[0], ids[1]).unwrap(),
            FusionOutcome::Failure { bits: (0, 1) }
        );
        let (mut e, ids) = engine_with(vec![c(R), c(0.0), c(0.0), c(R)]);
        assert_eq!(e.fusion_type_ii(ids[0], ids[1]).unwrap(), FusionOutcome::Success { sign: 1 });
        assert_eq!(e.fusion_type_ii(ids[0], ids[0]), Err(Error::SamePhoton(ids[0])));
    }

    #[test]
    fn fusion_with_lost_partner_consumes_survivor() {
        let (mut e, ids) = engine_with(vec![c(0.5); 4]);
        e.lose(ids[1]).unwrap();
        assert_eq!(
            e.fusion_type_ii(ids[0], ids[1]).unwrap(),
            FusionOutcome::LossDetected { photons_seen: 1 }
        );
        assert_eq!(e.status(ids[0]).unwrap(), Status::Measured);
        assert_eq!(e.hidden_log().len(), 2);
    }

    #[test]
    fn forcing_an_impossible_fusion_is_an_error() {
        let (mut e, ids) = engine_with(vec![c(0.0), c(1.0), c(0.0), c(0.0)]);
        e.set_script(Script::fusions([FusionChoice::Success]));
        assert!(matches!(e.fusion_type_ii(ids[0], ids[1]), Err(Error::ImpossibleOutcome(_))));
    }

    #[test]
    fn capacity_is_enforced() {
        let mut e = Engine::new(0, 0).with_capacity(2);
        e.add_state(&[Tag::Bare; 2], Age::Old, vec![c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        let err = e.add_state(&[Tag::Bare], Age::Old, vec![c(1.0), c(0.0)]).unwrap_err();
        assert_eq!(err, Error::Capacity { requested: 3, limit: 2 });
    }

    #[test]
    fn reorder_swaps_qubits() {
        let (e, ids) = engine_with(vec![c(0.0), c(1.0), c(0.0), c(0.0)]);
        let v = e.amplitudes_in(&[ids[1], ids[0]]).unwrap();
        assert!(close(&v, &[c(0.0), c(0.0), c(1.0), c(0.0)]));
    }
}
