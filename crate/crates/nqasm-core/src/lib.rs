//! NetQASM language core: instruction set, text assembler, binary codec and
//! shared classical memory.

pub mod asm;
pub mod codec;
pub mod isa;
pub mod program;
pub mod shmem;
#[doc(hidden)]
pub mod testgen;

pub use isa::{AngleSpec, Flavor, Opcode, OperandKind, RegisterName, RegisterRef};
pub use program::{Instruction, Operand, Subroutine};
