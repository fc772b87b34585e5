//! First-order, second-order and merged second-order Trotter circuits for the
//! qubit-encoded Hubbard chain on line connectivity.
//!
//! Same-spin hopping couples qubits two apart. Each hopping layer therefore
//! swaps the middle qubits of a bond, applies the hopping gadget to the two
//! adjacent pairs now holding (up, up) and (down, down), and swaps back.
//! Layer one handles even bonds, layer two odd bonds.
//!
//! The printed gadgets implement `exp(+i h δτ)` for their Hamiltonian piece
//! `h`; every builder here feeds them negated angles so that a step
//! approximates `exp(-i H δτ)`. Gadget functions take the physical angle.
//!
//! Blocks (chemical potential, interaction, each hopping layer) are separated
//! by barriers, which fixes the depth convention: 1 column for the chemical
//! potential layer, 4 for the interaction layer and 9 per hopping layer.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, QuantumCircuit};
use crate::error::{Error, Result};
use crate::model::{neel_state, HubbardParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrotterOrder {
    First,
    Second,
    SecondOptimized,
}

impl TrotterOrder {
    pub const ALL: [TrotterOrder; 3] = [TrotterOrder::First, TrotterOrder::Second, TrotterOrder::SecondOptimized];

    pub fn name(self) -> &'static str {
        match self {
            TrotterOrder::First => "first",
            TrotterOrder::Second => "second",
            TrotterOrder::SecondOptimized => "second-optimized",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub order: TrotterOrder,
    pub steps: usize,
    pub dt: f64,
    pub params: HubbardParams,
    #[serde(default)]
    pub prepare_neel: bool,
}

/// Per-step rotation angles (ħ = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepAngles {
    pub theta_t: f64,
    pub theta_u: f64,
    pub beta_up: f64,
    pub beta_down: f64,
}

impl StepAngles {
    fn halved(self) -> Self {
        Self {
            theta_t: self.theta_t / 2.0,
            theta_u: self.theta_u / 2.0,
            beta_up: self.beta_up / 2.0,
            beta_down: self.beta_down / 2.0,
        }
    }
}

impl TrotterPlan {
    pub fn new(order: TrotterOrder, steps: usize, dt: f64, params: HubbardParams) -> Self {
        Self { order, steps, dt, params, prepare_neel: false }
    }

    pub fn with_neel_preparation(mut self) -> Self {
        self.prepare_neel = true;
        self
    }

    pub fn total_time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn angles(&self) -> StepAngles {
        StepAngles {
            theta_t: self.params.t * self.dt,
            theta_u: self.params.u * self.dt,
            beta_up: self.params.mu_up * self.dt,
            beta_down: self.params.mu_down * self.dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.steps == 0 {
            return Err(Error::InvalidParameter("at least one Trotter step required".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("step size must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Hopping gadget on `(q_{2j}, q_{2j+1})`, equal to
/// `exp(+i θ/2 (XX + YY))` up to global phase.
pub fn u_t_gadget(theta: f64) -> QuantumCircuit {
    let printed = -theta;
    let mut c = QuantumCircuit::new(2);
    let gates = [
        Gate::cnot(1, 0),
        Gate::h(1),
        Gate::rz(1, printed + FRAC_PI_2),
        Gate::cnot(1, 0),
        Gate::rz(0, -printed),
        Gate::h(1),
        Gate::cnot(1, 0),
        Gate::rx(0, FRAC_PI_2),
        Gate::rx(1, -FRAC_PI_2),
    ];
    for g in gates {
        c.push(g).expect("two-qubit gadget");
    }
    c
}

/// On-site interaction gadget, equal to `exp(-i θ/4 (ZZ - ZI - IZ))` up to
/// global phase.
pub fn u_u_gadget(theta: f64) -> QuantumCircuit {
    let printed = -theta;
    let mut c = QuantumCircuit::new(2);
    let gates = [
        Gate::rz(0, printed / 2.0),
        Gate::rz(1, printed / 2.0),
        Gate::cnot(0, 1),
        Gate::rz(1, -printed / 2.0),
        Gate::cnot(0, 1),
    ];
    for g in gates {
        c.push(g).expect("two-qubit gadget");
    }
    c
}

/// Chemical-potential phases `exp(-i β n)` on the up (qubit 0) and down
/// (qubit 1) modes of one site.
pub fn u_mu_gadget(beta_up: f64, beta_down: f64) -> QuantumCircuit {
    let mut c = QuantumCircuit::new(2);
    c.push(Gate::rz(0, -beta_up)).expect("in range");
    c.push(Gate::rz(1, -beta_down)).expect("in range");
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoppingLayer {
    /// Bonds `(j, j+1)` with even `j`.
    One,
    /// Bonds `(j, j+1)` with odd `j`.
    Two,
}

/// Bonds handled by a layer; bond `j` couples sites `j` and `j + 1`.
pub fn hopping_bonds(sites: usize, which: HoppingLayer) -> Vec<usize> {
    let parity = match which {
        HoppingLayer::One => 0,
        HoppingLayer::Two => 1,
    };
    (0..sites.saturating_sub(1)).filter(|j| j % 2 == parity).collect()
}

/// One hopping layer on `2 * sites` qubits: SWAP(2j+1, 2j+2) on every bond of
/// the layer, hopping gadgets on (2j, 2j+1) and (2j+2, 2j+3), then the same
/// SWAPs again. Empty when the layer has no bonds.
pub fn hopping_layer(sites: usize, theta: f64, which: HoppingLayer) -> QuantumCircuit {
    let n = 2 * sites;
    let mut c = QuantumCircuit::new(n);
    let bonds = hopping_bonds(sites, which);
    let gadget = u_t_gadget(theta);
    for &j in &bonds {
        c.push(Gate::swap(2 * j + 1, 2 * j + 2)).expect("in range");
    }
    for &j in &bonds {
        c.append_shifted(&gadget, 2 * j).expect("in range");
        c.append_shifted(&gadget, 2 * j + 2).expect("in range");
    }
    for &j in &bonds {
        c.push(Gate::swap(2 * j + 1, 2 * j + 2)).expect("in range");
    }
    c
}

fn interaction_layer(sites: usize, theta_u: f64) -> QuantumCircuit {
    let mut c = QuantumCircuit::new(2 * sites);
    let gadget = u_u_gadget(theta_u);
    for j in 0..sites {
        c.append_shifted(&gadget, 2 * j).expect("in range");
    }
    c
}

fn chemical_layer(sites: usize, beta_up: f64, beta_down: f64) -> QuantumCircuit {
    let mut c = QuantumCircuit::new(2 * sites);
    let gadget = u_mu_gadget(beta_up, beta_down);
    for j in 0..sites {
        c.append_shifted(&gadget, 2 * j).expect("in range");
    }
    c
}

/// A Trotter circuit split at step boundaries: `prefix` (state preparation),
/// one body per step and a closing block, such that the `r`-step circuit is
/// `prefix · body_1 ⋯ body_r · closing`. For the merged second-order form
/// body `k > 1` starts with the merged interaction layer and the closing
/// block is the final half-angle interaction layer.
#[derive(Clone, Debug)]
pub struct TrotterSchedule {
    pub prefix: QuantumCircuit,
    pub bodies: Vec<QuantumCircuit>,
    pub closing: QuantumCircuit,
}

struct Assembler {
    circuit: QuantumCircuit,
    sites: usize,
}

impl Assembler {
    fn block(&mut self, block: QuantumCircuit) {
        if block.is_empty() {
            return;
        }
        if !self.circuit.is_empty() {
            self.circuit.barrier().expect("barrier always valid");
        }
        self.circuit.append(&block).expect("same width");
    }

    fn mu(&mut self, a: StepAngles) {
        self.block(chemical_layer(self.sites, a.beta_up, a.beta_down));
    }

    fn interaction(&mut self, theta_u: f64) {
        self.block(interaction_layer(self.sites, theta_u));
    }

    fn hop(&mut self, theta_t: f64, which: HoppingLayer) {
        self.block(hopping_layer(self.sites, theta_t, which));
    }
}

fn assemble(plan: &TrotterPlan) -> Result<(QuantumCircuit, Vec<usize>)> {
    plan.validate()?;
    let sites = plan.params.sites;
    let mut asm = Assembler { circuit: QuantumCircuit::new(2 * sites), sites };
    if plan.prepare_neel {
        let mut prep = QuantumCircuit::new(2 * sites);
        for q in neel_state(sites)?.ones() {
            prep.push(Gate::x(q))?;
        }
        asm.block(prep);
    }
    let mut marks = vec![asm.circuit.len()];
    let full = plan.angles();
    let half = full.halved();
    for step in 1..=plan.steps {
        asm.circuit.set_tag(step as u32);
        match plan.order {
            TrotterOrder::First => {
                asm.mu(full);
                asm.interaction(full.theta_u);
                asm.hop(full.theta_t, HoppingLayer::One);
                asm.hop(full.theta_t, HoppingLayer::Two);
            }
            TrotterOrder::Second => {
                asm.interaction(half.theta_u);
                asm.mu(half);
                asm.hop(half.theta_t, HoppingLayer::One);
                asm.hop(half.theta_t, HoppingLayer::Two);
                asm.hop(half.theta_t, HoppingLayer::Two);
                asm.hop(half.theta_t, HoppingLayer::One);
                asm.mu(half);
                asm.interaction(half.theta_u);
            }
            TrotterOrder::SecondOptimized => {
                asm.interaction(if step == 1 { half.theta_u } else { full.theta_u });
                asm.mu(half);
                asm.hop(half.theta_t, HoppingLayer::One);
                asm.hop(full.theta_t, HoppingLayer::Two);
                asm.hop(half.theta_t, HoppingLayer::One);
                asm.mu(half);
            }
        }
        marks.push(asm.circuit.len());
    }
    if plan.order == TrotterOrder::SecondOptimized {
        asm.interaction(half.theta_u);
    }
    Ok((asm.circuit, marks))
}

fn slice(c: &QuantumCircuit, range: std::ops::Range<usize>) -> QuantumCircuit {
    QuantumCircuit::from_parts(c.num_qubits(), c.gates()[range.clone()].to_vec(), c.tags()[range].to_vec())
        .expect("slice of a valid circuit")
}

pub fn schedule(plan: &TrotterPlan) -> Result<TrotterSchedule> {
    let (c, marks) = assemble(plan)?;
    let bodies = marks.windows(2).map(|w| slice(&c, w[0]..w[1])).collect();
    Ok(TrotterSchedule {
        prefix: slice(&c, 0..marks[0]),
        bodies,
        closing: slice(&c, *marks.last().expect("at least one mark")..c.len()),
    })
}

fn build_checked(plan: &TrotterPlan, order: TrotterOrder) -> Result<QuantumCircuit> {
    if plan.order != order {
        return Err(Error::InvalidParameter(format!(
            "plan order is {}, expected {}",
            plan.order.name(),
            order.name()
        )));
    }
    Ok(assemble(plan)?.0)
}

pub fn first_order_circuit(plan: &TrotterPlan) -> Result<QuantumCircuit> {
    build_checked(plan, TrotterOrder::First)
}

pub fn second_order_circuit(plan: &TrotterPlan) -> Result<QuantumCircuit> {
    build_checked(plan, TrotterOrder::Second)
}

pub fn optimized_second_order_circuit(plan: &TrotterPlan) -> Result<QuantumCircuit> {
    build_checked(plan, TrotterOrder::SecondOptimized)
}

/// Circuit for whichever order the plan names.
pub fn build_circuit(plan: &TrotterPlan) -> Result<QuantumCircuit> {
    Ok(assemble(plan)?.0)
}

/// Convention depth of an `r`-step circuit, derived from column counts
/// (chemical 1, interaction 4, hopping layer 9).
pub fn convention_depth(order: TrotterOrder, steps: usize) -> usize {
    match order {
        TrotterOrder::First => 23 * steps,
        TrotterOrder::Second => 46 * steps,
        TrotterOrder::SecondOptimized => 33 * steps + 4,
    }
}
