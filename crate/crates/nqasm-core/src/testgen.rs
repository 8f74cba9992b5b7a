//! Deterministic generation of random valid subroutines. Test support:
//! used by the round-trip suites and benches.

use crate::isa::{Flavor, Opcode, OperandKind, RegisterName, RegisterRef};
use crate::program::{Instruction, Operand, Subroutine};

/// SplitMix64; enough randomness for test-case generation and fully
/// deterministic across platforms.
#[derive(Debug, Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn i32(&mut self) -> i32 {
        self.next_u64() as i32
    }
}

fn random_register(rng: &mut SplitMix64) -> RegisterRef {
    let name = RegisterName::ALL[rng.below(4) as usize];
    RegisterRef::new(name, rng.below(16) as u8).unwrap()
}

fn random_operand(kind: OperandKind, rng: &mut SplitMix64) -> Operand {
    match kind {
        OperandKind::Immediate => Operand::Immediate(rng.i32()),
        OperandKind::Register => Operand::Register(random_register(rng)),
        OperandKind::Address => Operand::Address(rng.below(64) as u32),
        OperandKind::ArrayEntry => Operand::ArrayEntry {
            address: rng.below(64) as u32,
            index: random_register(rng),
        },
        OperandKind::ArraySlice => Operand::ArraySlice {
            address: rng.below(64) as u32,
            start: random_register(rng),
            stop: random_register(rng),
        },
    }
}

/// A random binary-ready subroutine in the given gate flavor. Branch targets
/// land inside `[0, len]` and angles use small denominators.
pub fn random_subroutine(flavor: Flavor, seed: u64) -> Subroutine {
    let mut rng = SplitMix64(seed);
    let opcodes: Vec<Opcode> = Opcode::ALL
        .iter()
        .copied()
        .filter(|op| op.flavor() == Flavor::Core || op.flavor() == flavor)
        .collect();
    let len = 1 + rng.below(40) as usize;
    let mut instructions = Vec::with_capacity(len);
    for _ in 0..len {
        let opcode = opcodes[rng.below(opcodes.len() as u64) as usize];
        let mut operands: Vec<Operand> = opcode
            .signature()
            .iter()
            .map(|k| random_operand(*k, &mut rng))
            .collect();
        if let Some(target) = opcode.branch_target_index() {
            operands[target] = Operand::Immediate(rng.below(len as u64 + 1) as i32);
        }
        instructions.push(Instruction::new(opcode, operands).unwrap());
    }
    Subroutine::new((1, 0), rng.below(1 << 20) as i32, instructions)
}
