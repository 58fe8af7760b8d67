//! Parity and redundancy code states, and the resource states the
//! protocols consume.
//!
//! `|0>^(n)` is the uniform superposition of even-weight strings of length
//! `n` and `|1>^(n)` the odd-weight one. A logical qubit concatenates `q`
//! parity blocks: `alpha |0>^(n)...|0>^(n) + beta |1>^(n)...|1>^(n)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qstate::{Age, Engine, PhotonId, Port, Tag};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalQubitSpec {
    pub alpha: C64,
    pub beta: C64,
}

impl LogicalQubitSpec {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("|alpha|^2+|beta|^2 = {norm}")));
        }
        Ok(LogicalQubitSpec { alpha, beta })
    }

    pub fn zero() -> Self {
        LogicalQubitSpec {
            alpha: C64::new(1.0, 0.0),
            beta: C64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        LogicalQubitSpec {
            alpha: C64::new(0.0, 0.0),
            beta: C64::new(1.0, 0.0),
        }
    }

    pub fn plus() -> Self {
        LogicalQubitSpec {
            alpha: C64::new(FRAC_1_SQRT_2, 0.0),
            beta: C64::new(FRAC_1_SQRT_2, 0.0),
        }
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        LogicalQubitSpec {
            alpha: C64::new((theta / 2.0).cos(), 0.0),
            beta: C64::from_polar((theta / 2.0).sin(), phi),
        }
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.alpha, self.beta]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeLayout {
    pub n: usize,
    pub q: usize,
}

impl CodeLayout {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::Domain(format!("layout needs n,q >= 1, got ({n},{q})")));
        }
        Ok(CodeLayout { n, q })
    }

    pub fn photons(&self) -> usize {
        self.n * self.q
    }
}

/// Block membership of one logical qubit. Blocks may have different
/// lengths once protocols have run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogicalQubit {
    pub blocks: Vec<Vec<PhotonId>>,
}

impl LogicalQubit {
    pub fn q(&self) -> usize {
        self.blocks.len()
    }

    pub fn photons(&self) -> Vec<PhotonId> {
        self.blocks.concat()
    }

    pub fn lens(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// A resource state `|0>_C|0>...|0> + |1>_C|1>...|1>` over a fusion port and
/// code blocks. For the CNOT resource the last block ends with port D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resource {
    pub port_c: PhotonId,
    pub port_d: Option<PhotonId>,
    pub blocks: Vec<Vec<PhotonId>>,
}

impl Resource {
    pub fn photons(&self) -> Vec<PhotonId> {
        let mut all = vec![self.port_c];
        all.extend(self.blocks.concat());
        all
    }
}

/// Amplitude of one parity block: `2^{-(n-1)/2}` on the right parity class.
fn block_amp(n: usize) -> f64 {
    0.5f64.powf((n as f64 - 1.0) / 2.0)
}

/// `alpha |0>^(l1)...|0>^(lk) + beta |1>^(l1)...|1>^(lk)` over `sum(lens)`
/// photons, blocks in order, big-endian.
pub fn logical_amplitudes(alpha: C64, beta: C64, lens: &[usize]) -> Vec<C64> {
    let k: usize = lens.iter().sum();
    let scale: f64 = lens.iter().map(|&l| block_amp(l)).product();
    let mut masks = Vec::with_capacity(lens.len());
    let mut shift = k;
    for &l in lens {
        shift -= l;
        masks.push(((1usize << l) - 1) << shift);
    }
    let mut out = vec![C64::new(0.0, 0.0); 1 << k];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut parity = None;
        let mut consistent = true;
        for m in &masks {
            let p = (i & m).count_ones() & 1;
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => {
                    consistent = false;
                    break;
                }
                _ => {}
            }
        }
        if consistent {
            *slot = match parity {
                Some(1) => beta * scale,
                _ => alpha * scale,
            };
        }
    }
    out
}

/// Amplitudes of `alpha|0>^(n) + beta|1>^(n)`.
pub fn parity_amplitudes(spec: &LogicalQubitSpec, n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::Domain("parity length must be >= 1".into()));
    }
    Ok(logical_amplitudes(spec.alpha, spec.beta, &[n]))
}

fn code_tags(lens: &[usize]) -> Vec<Tag> {
    lens.iter()
        .enumerate()
        .flat_map(|(block, &l)| (0..l).map(move |index| Tag::Code { block, index }))
        .collect()
}

fn split(ids: &[PhotonId], lens: &[usize]) -> Vec<Vec<PhotonId>> {
    let mut out = Vec::with_capacity(lens.len());
    let mut at = 0;
    for &l in lens {
        out.push(ids[at..at + l].to_vec());
        at += l;
    }
    out
}

/// Adds a single parity-encoded qubit (`q = 1`) to the register.
pub fn make_parity(engine: &mut Engine, spec: &LogicalQubitSpec, n: usize) -> Result<LogicalQubit> {
    let amps = parity_amplitudes(spec, n)?;
    let ids = engine.add_state(&code_tags(&[n]), Age::Old, amps)?;
    Ok(LogicalQubit { blocks: vec![ids] })
}

/// Adds a logical qubit in layout `(n, q)` to the register.
pub fn make_redundant(engine: &mut Engine, spec: &LogicalQubitSpec, layout: CodeLayout) -> Result<LogicalQubit> {
    let lens = vec![layout.n; layout.q];
    let amps = logical_amplitudes(spec.alpha, spec.beta, &lens);
    let ids = engine.add_state(&code_tags(&lens), Age::Old, amps)?;
    Ok(LogicalQubit {
        blocks: split(&ids, &lens),
    })
}

fn add_resource(engine: &mut Engine, lens: &[usize], with_d: bool) -> Result<Resource> {
    let mut all = vec![1];
    all.extend_from_slice(lens);
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let amps = logical_amplitudes(r, r, &all);
    let mut tags = vec![Tag::Port(Port::C)];
    for (block, &l) in lens.iter().enumerate() {
        for index in 0..l {
            tags.push(Tag::Resource { block, index });
        }
    }
    if with_d {
        *tags.last_mut().expect("non-empty") = Tag::Port(Port::D);
    }
    let ids = engine.add_state(&tags, Age::New, amps)?;
    let blocks = split(&ids[1..], lens);
    let port_d = if with_d { blocks.last().and_then(|b| b.last()).copied() } else { None };
    Ok(Resource {
        port_c: ids[0],
        port_d,
        blocks,
    })
}

/// `|0>|0>^(n)...|0>^(n) + |1>|1>^(n)...|1>^(n)` with `q` blocks.
pub fn make_memory_resource(engine: &mut Engine, n: usize, q: usize) -> Result<Resource> {
    CodeLayout::new(n, q)?;
    add_resource(engine, &vec![n; q], false)
}

/// Single-block re-encoding resource, the `(n+1)`-photon parity state.
pub fn make_r1(engine: &mut Engine, n: usize) -> Result<Resource> {
    make_memory_resource(engine, n, 1)
}

/// Full redundancy re-encoding resource.
pub fn make_r2(engine: &mut Engine, n: usize, q: usize) -> Result<Resource> {
    make_memory_resource(engine, n, q)
}

/// Length of the target block inside the CNOT resource, `floor(n/2)`.
pub fn cnot_target_len(n: usize) -> usize {
    n / 2
}

/// CNOT resource over port C, a control block N of `n` photons, a target
/// block T of `m = floor(n/2)` photons and port D:
/// `sum_c |c>_C |c>^(n)_N (|c>^(m)_T |0>_D + |c+1>^(m)_T |1>_D)`, normalized.
/// T and D together form a parity block of `m+1` photons.
pub fn make_r3(engine: &mut Engine, n: usize) -> Result<Resource> {
    if n < 2 {
        return Err(Error::Domain(format!("CNOT resource needs n >= 2, got {n}")));
    }
    make_cnot_resource(engine, n, cnot_target_len(n))
}

/// CNOT resource with an explicit target length `m >= 1`.
pub fn make_cnot_resource(engine: &mut Engine, n: usize, m: usize) -> Result<Resource> {
    if n == 0 || m == 0 {
        return Err(Error::Domain(format!("CNOT resource needs n,m >= 1, got ({n},{m})")));
    }
    add_resource(engine, &[n, m + 1], true)
}

/// Projection of the register onto the logical basis of `qubits`, which
/// must hold every present photon between them. Entry `b` is the overlap
/// with `|b_1 ... b_k>_L`, first qubit most significant.
pub fn logical_projection(engine: &Engine, qubits: &[&LogicalQubit]) -> Result<Vec<C64>> {
    let order: Vec<PhotonId> = qubits.iter().flat_map(|q| q.photons()).collect();
    let v = engine.amplitudes_in(&order)?;
    let total = order.len();
    // (qubit, bit mask of one block) for every block, big-endian positions
    let mut blocks = Vec::new();
    let mut scale = 1.0;
    let mut at = 0;
    for (k, q) in qubits.iter().enumerate() {
        for b in &q.blocks {
            let mut mask = 0usize;
            for i in at..at + b.len() {
                mask |= 1 << (total - 1 - i);
            }
            blocks.push((k, mask));
            scale *= block_amp(b.len());
            at += b.len();
        }
    }
    let nq = qubits.len();
    let mut out = vec![C64::new(0.0, 0.0); 1 << nq];
    'idx: for (idx, amp) in v.iter().enumerate() {
        let mut bits = vec![None; nq];
        for &(k, mask) in &blocks {
            let p = ((idx & mask).count_ones() & 1) as u8;
            match bits[k] {
                None => bits[k] = Some(p),
                Some(b) if b != p => continue 'idx,
                Some(_) => {}
            }
        }
        let label = bits.iter().fold(0, |acc, b| (acc << 1) | b.unwrap_or(0) as usize);
        out[label] += amp * scale;
    }
    Ok(out)
}

/// A code qubit maximally entangled with one bare reference photon:
/// `(|r=0>|0_L> + |r=1>|1_L>)/sqrt(2)`. Returns `(reference, code)`.
pub fn make_choi_pair(engine: &mut Engine, layout: CodeLayout) -> Result<(LogicalQubit, LogicalQubit)> {
    let mut lens = vec![1];
    lens.extend(std::iter::repeat_n(layout.n, layout.q));
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut tags = vec![Tag::Bare];
    for block in 0..layout.q {
        tags.extend((0..layout.n).map(|index| Tag::Code { block, index }));
    }
    let ids = engine.add_state(&tags, Age::Old, logical_amplitudes(r, r, &lens))?;
    let reference = LogicalQubit { blocks: vec![vec![ids[0]]] };
    let code = LogicalQubit {
        blocks: ids[1..].chunks(layout.n).map(<[_]>::to_vec).collect(),
    };
    Ok((reference, code))
}

/// `(I (x) U)` applied to `d` maximally entangled pairs, reference labels
/// most significant. `u` is given row by row. Comparing this with the
/// [`logical_projection`] of the references followed by the code qubits
/// gives the process fidelity.
pub fn choi_state(u: &[Vec<C64>]) -> Vec<C64> {
    let d = u.len();
    let norm = (d as f64).sqrt();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for l in 0..d {
            v[r * d + l] = u[l][r] / norm;
        }
    }
    v
}

/// Builds `|0>^(n)` from Bell pairs with type-I joins, restarting after any
/// failed join. Returns the block and the number of Bell pairs consumed.
pub fn fused_parity_zero(engine: &mut Engine, n: usize, max_pairs: usize) -> Result<(Vec<PhotonId>, usize)> {
    if n < 2 {
        return Err(Error::Domain(format!("fusion construction needs n >= 2, got {n}")));
    }
    let bell = || logical_amplitudes(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0), &[1, 1]);
    let tags = [Tag::Bare; 2];
    let mut used = 1;
    let mut block = engine.add_state(&tags, Age::New, bell())?;
    while block.len() < n {
        if used >= max_pairs {
            return Err(Error::Budget(used));
        }
        let pair = engine.add_state(&tags, Age::New, bell())?;
        used += 1;
        let out = engine.fusion_type_i_join(&block, &pair)?;
        block = if out.success {
            out.merged
        } else {
            used += 1;
            engine.add_state(&tags, Age::New, bell())?
        };
    }
    Ok((block, used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{fidelity, Basis, FusionChoice, FusionOutcome, Script};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn close(a: &[C64], b: &[C64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn small_parity_states() {
        let r = FRAC_1_SQRT_2;
        assert!(close(&parity_amplitudes(&LogicalQubitSpec::zero(), 1).unwrap(), &[c(1.0), c(0.0)]));
        assert!(close(
            &parity_amplitudes(&LogicalQubitSpec::zero(), 2).unwrap(),
            &[c(r), c(0.0), c(0.0), c(r)]
        ));
        assert!(close(
            &parity_amplitudes(&LogicalQubitSpec::one(), 2).unwrap(),
            &[c(0.0), c(r), c(r), c(0.0)]
        ));
        assert!(parity_amplitudes(&LogicalQubitSpec::zero(), 0).is_err());
    }

    #[test]
    fn parity_support() {
        for n in 1..=6 {
            let z = parity_amplitudes(&LogicalQubitSpec::zero(), n).unwrap();
            let o = parity_amplitudes(&LogicalQubitSpec::one(), n).unwrap();
            for i in 0..1usize << n {
                let odd = i.count_ones() % 2 == 1;
                assert!(if odd { z[i].norm() } else { o[i].norm() } <= 1e-14);
            }
        }
    }

    #[test]
    fn redundant_one_one_is_bare_qubit() {
        let spec = LogicalQubitSpec::bloch(1.1, 0.4);
        let mut e = Engine::new(0, 0);
        make_redundant(&mut e, &spec, CodeLayout::new(1, 1).unwrap()).unwrap();
        assert!(close(e.amplitudes(), &[spec.alpha, spec.beta]));
    }

    #[test]
    fn redundant_two_two_zero_is_product_of_blocks() {
        let mut e = Engine::new(0, 0);
        make_redundant(&mut e, &LogicalQubitSpec::zero(), CodeLayout::new(2, 2).unwrap()).unwrap();
        let b = parity_amplitudes(&LogicalQubitSpec::zero(), 2).unwrap();
        let mut expect = Vec::new();
        for x in &b {
            expect.extend(b.iter().map(|y| x * y));
        }
        assert!(close(e.amplitudes(), &expect));
    }

    #[test]
    fn memory_resource_small_cases() {
        let mut e = Engine::new(0, 0);
        make_memory_resource(&mut e, 1, 1).unwrap();
        let r = FRAC_1_SQRT_2;
        assert!(close(e.amplitudes(), &[c(r), c(0.0), c(0.0), c(r)]));
        for n in 1..=4 {
            let mut e = Engine::new(0, 0);
            let res = make_memory_resource(&mut e, n, 1).unwrap();
            assert_eq!(e.slot(res.port_c).unwrap().tag, Tag::Port(Port::C));
            let z = parity_amplitudes(&LogicalQubitSpec::zero(), n + 1).unwrap();
            assert!(close(e.amplitudes(), &z));
        }
    }

    #[test]
    fn r3_for_two_matches_hand_expansion() {
        let mut e = Engine::new(0, 0);
        let res = make_r3(&mut e, 2).unwrap();
        assert_eq!(res.blocks[1].len(), 2);
        assert_eq!(res.port_d, Some(res.blocks[1][1]));
        // order C, N1, N2, T, D
        let zero2 = [0b00usize, 0b11];
        let one2 = [0b01usize, 0b10];
        let mut expect = vec![c(0.0); 32];
        for &nn in &zero2 {
            for td in [0b00usize, 0b11] {
                expect[(nn << 2) | td] = c(1.0);
            }
        }
        for &nn in &one2 {
            for td in [0b10usize, 0b01] {
                expect[(1 << 4) | (nn << 2) | td] = c(1.0);
            }
        }
        let norm = (8.0f64).sqrt();
        expect.iter_mut().for_each(|x| *x /= norm);
        assert!(close(e.amplitudes(), &expect));
        assert!(make_r3(&mut Engine::new(0, 0), 1).is_err());
    }

    #[test]
    fn hadamard_on_all_photons_gives_ghz() {
        for n in 1..=5 {
            let mut e = Engine::new(0, 0);
            let q = make_parity(&mut e, &LogicalQubitSpec::zero(), n).unwrap();
            for &p in &q.blocks[0] {
                e.apply_1q(p, &crate::qstate::gate::h()).unwrap();
            }
            let a = e.amplitudes();
            let r = FRAC_1_SQRT_2;
            assert!((a[0] - c(r)).norm() < 1e-12 && (a[a.len() - 1] - c(r)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_photon_measurement_hides_the_spec() {
        // Computational outcome of any photon is 1/2 regardless of spec.
        let spec = LogicalQubitSpec::bloch(0.3, 1.0);
        let lens = [3, 3];
        let amps = logical_amplitudes(spec.alpha, spec.beta, &lens);
        for bit in 0..6 {
            let p1: f64 = amps
                .iter()
                .enumerate()
                .filter(|(i, _)| (i >> bit) & 1 == 1)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            assert!((p1 - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn extension_by_fusion_equals_synthesis() {
        // fuse one photon of |psi>^(m) with |0>^(n+2), success gives |psi>^(m+n)
        let spec = LogicalQubitSpec::bloch(0.9, -0.3);
        for (m, n) in [(2, 1), (3, 2), (2, 3)] {
            for sign in [1i8, -1] {
                let mut e = Engine::new(0, 0);
                let blk = make_parity(&mut e, &spec, m).unwrap().blocks.remove(0);
                let res = make_parity(&mut e, &LogicalQubitSpec::zero(), n + 2).unwrap().blocks.remove(0);
                e.set_script(Script::fusions([FusionChoice::Sign(sign)]));
                let out = e.fusion_type_ii(blk[0], res[0]).unwrap();
                assert_eq!(out, FusionOutcome::Success { sign });
                if sign < 0 {
                    for &p in &res[1..] {
                        e.apply_1q(p, &crate::qstate::gate::z()).unwrap();
                    }
                }
                let merged: Vec<_> = blk[1..].iter().chain(&res[1..]).copied().collect();
                let got = e.amplitudes_in(&merged).unwrap();
                let want = parity_amplitudes(&spec, m + n).unwrap();
                assert!(fidelity(&want, &got) >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn fused_construction_matches_synthesis() {
        let mut e = Engine::new(5, 0);
        let (block, used) = fused_parity_zero(&mut e, 5, 10_000).unwrap();
        assert!(used >= 4);
        let got = e.amplitudes_in(&block).unwrap();
        let want = parity_amplitudes(&LogicalQubitSpec::zero(), 5).unwrap();
        assert!(fidelity(&want, &got) >= 1.0 - 1e-12);
        let _ = e.measure(block[0], Basis::Computational).unwrap();
    }
}
