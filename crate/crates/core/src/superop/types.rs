//! The Pauli superoperator of a stabilizer measurement and its cache file
//! format.

use std::fmt::Write as _;

use rand::Rng;

use super::basis::StabilizerType;
use crate::densmat::PauliString;
use crate::error::ParseError;
use crate::rng::SimRng;

pub const SUPEROP_FORMAT_VERSION: u32 = 1;
pub const PROBABILITY_SUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperopKind {
    Success,
    Fail,
}

impl SuperopKind {
    pub fn name(&self) -> &'static str {
        match self {
            SuperopKind::Success => "success",
            SuperopKind::Fail => "fail",
        }
    }

    pub fn from_name(s: &str) -> Option<SuperopKind> {
        match s {
            "success" => Some(SuperopKind::Success),
            "fail" => Some(SuperopKind::Fail),
            _ => None,
        }
    }
}

/// Probability map over `(4-qubit Pauli error, measurement-parity flag)`.
///
/// All `2 * 4^n` entries are stored; the probability mass sits on the coset
/// representatives (the lexicographically smaller of `{P_m, P_m P^(x)n}`),
/// their partners carry zero. Entry order: dense Pauli index, no-error flag
/// before error flag.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub stabilizer_type: StabilizerType,
    pub kind: SuperopKind,
    /// Completion probability of GHZ generation within the cycle time.
    pub p_ghz: f64,
    n: usize,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Superoperator {
    pub fn new(
        stabilizer_type: StabilizerType,
        kind: SuperopKind,
        p_ghz: f64,
        n: usize,
        probabilities: Vec<f64>,
    ) -> Result<Superoperator, crate::error::SimError> {
        let entries = 2 * (1usize << (2 * n));
        if probabilities.len() != entries {
            return Err(crate::error::SimError::DimensionMismatch {
                expected: entries,
                actual: probabilities.len(),
            });
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(crate::error::SimError::InvalidParameter(format!(
                "superoperator probabilities sum to {sum}"
            )));
        }
        if probabilities.iter().any(|p| *p < 0.0) {
            return Err(crate::error::SimError::InvalidParameter(
                "negative superoperator probability".into(),
            ));
        }
        let mut cumulative = Vec::with_capacity(probabilities.len());
        let mut acc = 0.0;
        for p in &probabilities {
            acc += p;
            cumulative.push(acc);
        }
        Ok(Superoperator {
            stabilizer_type,
            kind,
            p_ghz,
            n,
            probabilities,
            cumulative,
        })
    }

    /// The identity superoperator: no error, no measurement flip.
    pub fn identity(stabilizer_type: StabilizerType, kind: SuperopKind, n: usize) -> Superoperator {
        let mut probabilities = vec![0.0; 2 * (1usize << (2 * n))];
        probabilities[0] = 1.0;
        Superoperator::new(stabilizer_type, kind, 1.0, n, probabilities).expect("valid")
    }

    /// Diagonal product superoperator for the perfect-measurement
    /// phenomenological proxy: each qubit independently suffers an X flip
    /// with probability `p` and a Z flip with probability `p`.
    pub fn iid_depolarizing_proxy(
        stabilizer_type: StabilizerType,
        p: f64,
        n: usize,
    ) -> Superoperator {
        let weights = |letter: crate::densmat::Pauli| -> f64 {
            use crate::densmat::Pauli;
            match letter {
                Pauli::I => (1.0 - p) * (1.0 - p),
                Pauli::X | Pauli::Z => p * (1.0 - p),
                Pauli::Y => p * p,
            }
        };
        let count = 1usize << (2 * n);
        let mut probabilities = vec![0.0; 2 * count];
        for m in 0..count {
            let string = PauliString::from_dense_index(m, n);
            let w: f64 = string.0.iter().map(|l| weights(*l)).product();
            // Entire mass on the no-measurement-error flag; assign to the
            // coset representative so partners stay zero.
            let full = PauliString::uniform(stabilizer_type.letter(), n);
            let partner = string.mul_letterwise(&full);
            let rep = if partner.index() < m { partner.index() } else { m };
            probabilities[2 * rep] += w;
        }
        Superoperator::new(stabilizer_type, SuperopKind::Success, 1.0, n, probabilities)
            .expect("valid proxy")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_entries(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probability(&self, pauli_index: usize, meas_error: bool) -> f64 {
        self.probabilities[2 * pauli_index + meas_error as usize]
    }

    /// The stabilizer fidelity: identity error, no measurement flip.
    pub fn stabilizer_fidelity(&self) -> f64 {
        self.probabilities[0]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Sample an entry: `(Pauli string, measurement-error flag)`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> (PauliString, bool) {
        let r = rng.gen::<f64>() * self.cumulative.last().unwrap();
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&r).unwrap())
        {
            Ok(i) => i + 1,
            Err(i) => i,
        }
        .min(self.probabilities.len() - 1);
        (
            PauliString::from_dense_index(idx / 2, self.n),
            idx % 2 == 1,
        )
    }

    pub fn sample_rng(&self, rng: &mut SimRng) -> (PauliString, bool) {
        self.sample(rng)
    }

    /// Serialize the entry block: one line per `(pauli, parity)` with 17
    /// significant digits.
    pub fn entries_text(&self) -> String {
        let mut out = String::new();
        let count = 1usize << (2 * self.n);
        for m in 0..count {
            let s = PauliString::from_dense_index(m, self.n);
            for (flag, sym) in [(false, '+'), (true, '-')] {
                let _ = writeln!(
                    out,
                    "{s} {sym} {:.16e}",
                    self.probability(m, flag)
                );
            }
        }
        out
    }

    pub fn parse_entries(
        text: &str,
        stabilizer_type: StabilizerType,
        kind: SuperopKind,
        p_ghz: f64,
        n: usize,
        file: &str,
    ) -> Result<Superoperator, ParseError> {
        let count = 1usize << (2 * n);
        let mut probabilities = vec![0.0; 2 * count];
        let mut seen = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let syntax = |msg: String| ParseError::Syntax {
                file: file.into(),
                line: lineno + 1,
                msg,
            };
            if toks.len() != 3 {
                return Err(syntax("expected `pauli parity probability`".into()));
            }
            let string = PauliString::parse(toks[0])
                .ok_or_else(|| syntax(format!("bad pauli `{}`", toks[0])))?;
            if string.len() != n {
                return Err(syntax(format!("pauli length {} != {n}", string.len())));
            }
            let flag = match toks[1] {
                "+" => false,
                "-" => true,
                other => return Err(syntax(format!("bad parity `{other}`"))),
            };
            let p: f64 = toks[2]
                .parse()
                .map_err(|_| syntax(format!("bad probability `{}`", toks[2])))?;
            probabilities[2 * string.index() + flag as usize] = p;
            seen += 1;
        }
        if seen != 2 * count {
            return Err(ParseError::Syntax {
                file: file.into(),
                line: 0,
                msg: format!("expected {} entry lines, found {seen}", 2 * count),
            });
        }
        Superoperator::new(stabilizer_type, kind, p_ghz, n, probabilities).map_err(|e| {
            ParseError::Syntax {
                file: file.into(),
                line: 0,
                msg: e.to_string(),
            }
        })
    }
}

/// Header of a superoperator cache file.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperopHeader {
    pub recipe_hash: u64,
    pub hardware_hash: u64,
    pub t_ghz: f64,
    pub shots: u64,
    pub stabilizer: StabilizerType,
    pub kind: SuperopKind,
    pub p_ghz: f64,
}

/// Full cache file: header plus the entry block.
pub fn superop_to_text(header: &SuperopHeader, sop: &Superoperator) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# superoperator cache");
    let _ = writeln!(out, "version {SUPEROP_FORMAT_VERSION}");
    let _ = writeln!(out, "recipe_hash {:016x}", header.recipe_hash);
    let _ = writeln!(out, "hardware_hash {:016x}", header.hardware_hash);
    let _ = writeln!(out, "t_ghz {:.16e}", header.t_ghz);
    let _ = writeln!(out, "shots {}", header.shots);
    let _ = writeln!(out, "stabilizer {}", header.stabilizer.name());
    let _ = writeln!(out, "kind {}", header.kind.name());
    let _ = writeln!(out, "p_ghz {:.16e}", header.p_ghz);
    let _ = writeln!(out, "entries {}", sop.num_entries());
    out.push_str(&sop.entries_text());
    out
}

pub fn superop_from_text(text: &str, file: &str) -> Result<(SuperopHeader, Superoperator), ParseError> {
    let mut lines = text.lines().enumerate().peekable();
    let mut fields: std::collections::BTreeMap<String, String> = Default::default();
    let mut entry_start = 0usize;
    for (lineno, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        fields.insert(key.to_string(), rest.trim().to_string());
        if key == "entries" {
            entry_start = lineno + 1;
            break;
        }
    }
    let get = |k: &str| -> Result<String, ParseError> {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| ParseError::MissingKey(k.into()))
    };
    let bad = |k: &str| ParseError::Syntax {
        file: file.into(),
        line: 0,
        msg: format!("bad value for `{k}`"),
    };
    let version: u32 = get("version")?.parse().map_err(|_| bad("version"))?;
    if version != SUPEROP_FORMAT_VERSION {
        return Err(ParseError::Syntax {
            file: file.into(),
            line: 0,
            msg: format!("unsupported version {version}"),
        });
    }
    let header = SuperopHeader {
        recipe_hash: u64::from_str_radix(&get("recipe_hash")?, 16).map_err(|_| bad("recipe_hash"))?,
        hardware_hash: u64::from_str_radix(&get("hardware_hash")?, 16)
            .map_err(|_| bad("hardware_hash"))?,
        t_ghz: get("t_ghz")?.parse().map_err(|_| bad("t_ghz"))?,
        shots: get("shots")?.parse().map_err(|_| bad("shots"))?,
        stabilizer: StabilizerType::from_name(&get("stabilizer")?).ok_or_else(|| bad("stabilizer"))?,
        kind: SuperopKind::from_name(&get("kind")?).ok_or_else(|| bad("kind"))?,
        p_ghz: get("p_ghz")?.parse().map_err(|_| bad("p_ghz"))?,
    };
    let entries: usize = get("entries")?.parse().map_err(|_| bad("entries"))?;
    let n = (entries / 2).trailing_zeros() as usize / 2;
    if 2 * (1usize << (2 * n)) != entries {
        return Err(bad("entries"));
    }
    let body: String = text
        .lines()
        .skip(entry_start)
        .collect::<Vec<_>>()
        .join("\n");
    let sop = Superoperator::parse_entries(
        &body,
        header.stabilizer,
        header.kind,
        header.p_ghz,
        n,
        file,
    )?;
    Ok((header, sop))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_superoperator_has_unit_fidelity() {
        let s = Superoperator::identity(StabilizerType::Z, SuperopKind::Success, 4);
        assert_eq!(s.num_entries(), 512);
        assert_eq!(s.stabilizer_fidelity(), 1.0);
        let mut rng = crate::rng::shot_rng(0, 0);
        let (p, flag) = s.sample(&mut rng);
        assert!(p.is_identity());
        assert!(!flag);
    }

    #[test]
    fn file_round_trip_is_lossless() {
        let mut probs = vec![0.0; 512];
        // Mass on a handful of representatives with awkward digits.
        probs[0] = 0.25 + 1e-13;
        probs[1] = 0.125;
        probs[2 * 7] = 0.0625 + 3e-17;
        probs[2 * 33 + 1] = 1.0 - probs[0] - probs[1] - probs[2 * 7];
        let sop =
            Superoperator::new(StabilizerType::X, SuperopKind::Success, 0.75, 4, probs).unwrap();
        let header = SuperopHeader {
            recipe_hash: 0xdeadbeef,
            hardware_hash: 0x1234,
            t_ghz: 0.0123456789012345,
            shots: 100_000,
            stabilizer: StabilizerType::X,
            kind: SuperopKind::Success,
            p_ghz: 0.75,
        };
        let text = superop_to_text(&header, &sop);
        let (h2, s2) = superop_from_text(&text, "mem").unwrap();
        assert_eq!(h2, header);
        for i in 0..512 {
            assert_eq!(
                sop.probabilities()[i].to_bits(),
                s2.probabilities()[i].to_bits(),
                "entry {i} must round-trip bit-exactly"
            );
        }
        assert_eq!(superop_to_text(&h2, &s2), text);
    }

    #[test]
    fn sampling_matches_probabilities() {
        let mut probs = vec![0.0; 32];
        probs[0] = 0.5;
        probs[3] = 0.25;
        probs[8] = 0.25;
        let sop = Superoperator::new(StabilizerType::Z, SuperopKind::Success, 1.0, 2, probs).unwrap();
        let mut rng = crate::rng::shot_rng(1, 0);
        let draws = 1_000_000usize;
        let mut counts = [0usize; 32];
        for _ in 0..draws {
            let (p, flag) = sop.sample(&mut rng);
            counts[2 * p.index() + flag as usize] += 1;
        }
        for (i, c) in counts.iter().enumerate() {
            let expect = sop.probabilities()[i];
            let rate = *c as f64 / draws as f64;
            let sigma = (expect * (1.0 - expect) / draws as f64).sqrt().max(1e-9);
            assert!(
                (rate - expect).abs() < 5.0 * sigma + 1e-9,
                "entry {i}: rate {rate} expect {expect}"
            );
        }
    }

    #[test]
    fn proxy_marginals_are_independent_flips() {
        // Multiplying a string by the measured stabilizer permutes I<->Z
        // and X<->Y per site, so the bit-flip class {X, Y} (and the
        // phase-flip class {Z, Y}) of each qubit survives the coset
        // folding; the marginals must be exactly p.
        use crate::densmat::{Pauli, PauliString};
        let p = 0.07;
        let z_sop = Superoperator::iid_depolarizing_proxy(StabilizerType::Z, p, 4);
        let x_sop = Superoperator::iid_depolarizing_proxy(StabilizerType::X, p, 4);
        for qubit in 0..4 {
            let mut x_class = 0.0;
            let mut z_class = 0.0;
            for m in 0..256 {
                let s = PauliString::from_dense_index(m, 4);
                if matches!(s.0[qubit], Pauli::X | Pauli::Y) {
                    x_class += z_sop.probability(m, false) + z_sop.probability(m, true);
                }
                if matches!(s.0[qubit], Pauli::Z | Pauli::Y) {
                    z_class += x_sop.probability(m, false) + x_sop.probability(m, true);
                }
            }
            assert!((x_class - p).abs() < 1e-12, "X marginal {x_class}");
            assert!((z_class - p).abs() < 1e-12, "Z marginal {z_class}");
        }
        assert!((z_sop.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
