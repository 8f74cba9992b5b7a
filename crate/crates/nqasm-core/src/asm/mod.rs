//! Text-form pipeline: preprocessing, parsing, label resolution, lowering
//! into the binary-ready form, and canonical printing.
//!
//! The text form is more permissive than the binary form: operands that the
//! signature declares as REGISTER may be written as integers or `@` addresses
//! and branch targets may be label names. [`resolve`] removes all of that,
//! first inserting `set`/`lea` instructions over the reserved scratch
//! registers and then replacing labels by instruction indices (label indices
//! are computed after all insertions). [`resolve_labels`] performs the label
//! replacement alone, which matches the listings of the text format docs.

mod parse;
mod preprocess;
mod print;
mod resolve;

pub use parse::parse;
pub use preprocess::{preprocess, BodyLine};
pub use print::{print_subroutine, print_symbolic};
pub use resolve::{lower, resolve, resolve_labels, Resolved};

use thiserror::Error;

use crate::isa::{IsaError, Opcode, RegisterName, RegisterRef};
use crate::program::SubroutineError;

/// Metadata collected from the `#` directives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceMetadata {
    pub version: (u8, u8),
    pub app_id: i32,
    /// Macro definitions in source order.
    pub defines: Vec<(String, String)>,
}

/// Register-or-immediate, used for array indices before lowering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegOrImm {
    Reg(RegisterRef),
    Imm(i32),
}

/// Operand as written in text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymOperand {
    Immediate(i32),
    Register(RegisterRef),
    Address(u32),
    ArrayEntry { address: u32, index: RegOrImm },
    ArraySlice { address: u32, start: RegOrImm, stop: RegOrImm },
    Label(String),
}

/// One parsed instruction with its source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicInstruction {
    pub opcode: Opcode,
    pub operands: Vec<SymOperand>,
    pub line: u32,
}

/// Instruction plus the labels declared immediately before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicItem {
    pub labels: Vec<String>,
    pub instruction: SymbolicInstruction,
}

/// Parsed text subroutine prior to resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSubroutine {
    pub metadata: SourceMetadata,
    pub items: Vec<SymbolicItem>,
    /// Labels declared after the last instruction; they resolve to the
    /// instruction count.
    pub trailing_labels: Vec<String>,
}

/// Scratch registers reserved for lowering, used in this order.
pub const SCRATCH_REGISTERS: [u8; 5] = [15, 14, 13, 12, 11];

pub(crate) fn scratch(slot: usize) -> Option<RegisterRef> {
    SCRATCH_REGISTERS
        .get(slot)
        .and_then(|&i| RegisterRef::new(RegisterName::R, i))
}

/// Warnings produced while assembling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AsmWarning {
    /// User code touches a reserved scratch register while lowering also
    /// writes to the scratch pool.
    ReservedRegisterCollision { register: RegisterRef, line: u32 },
}

impl std::fmt::Display for AsmWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AsmWarning::ReservedRegisterCollision { register, line } => write!(
                f,
                "line {line}: register {register} is reserved for lowering and the \
                 subroutine required lowering"
            ),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AsmError {
    #[error("missing required directive `# {0}`")]
    MissingDirective(&'static str),
    #[error("line {line}: directive `# {directive}` appears after the subroutine body")]
    DirectiveOrder { directive: String, line: u32 },
    #[error("line {line}: duplicate directive `# {directive}`")]
    DuplicateDirective { directive: String, line: u32 },
    #[error("line {line}: unknown directive `# {directive}`")]
    UnknownDirective { directive: String, line: u32 },
    #[error("line {line}: malformed directive: {reason}")]
    BadDirective { reason: String, line: u32 },
    #[error("line {line}: `${key}` has no DEFINE")]
    UndefinedMacro { key: String, line: u32 },
    #[error("line {line}: unknown mnemonic `{mnemonic}`")]
    UnknownMnemonic { mnemonic: String, line: u32 },
    #[error("line {line}: register name `{name}` is not one of C, R, Q, M")]
    UnknownRegisterName { name: char, line: u32 },
    #[error("line {line}: register index {index} out of range (0..16)")]
    InvalidRegisterIndex { index: u32, line: u32 },
    #[error("line {line}: cannot parse operand `{text}`")]
    BadOperand { text: String, line: u32 },
    #[error("line {line}: {source}")]
    Signature {
        #[source]
        source: IsaError,
        line: u32,
    },
    #[error("line {line}: label `{label}` defined more than once")]
    DuplicateLabel { label: String, line: u32 },
    #[error("line {line}: label `{label}` used outside a branch target")]
    LabelOutsideBranch { label: String, line: u32 },
    #[error("label `{0}` is not defined")]
    UndefinedLabel(String),
    #[error("operand cannot be lowered to binary form at instruction {0}")]
    NotLowerable(usize),
    #[error("resolved subroutine is inconsistent: {0}")]
    Inconsistent(#[from] SubroutineError),
}

/// Preprocess, parse and resolve a text subroutine in one step.
pub fn assemble_text(source: &str, flavor: crate::isa::Flavor) -> Result<Resolved, AsmError> {
    let (metadata, body) = preprocess(source)?;
    let sym = parse(&body, metadata, flavor)?;
    resolve(&sym)
}

/// Preprocess and parse without resolving.
pub fn parse_text(
    source: &str,
    flavor: crate::isa::Flavor,
) -> Result<SymbolicSubroutine, AsmError> {
    let (metadata, body) = preprocess(source)?;
    parse(&body, metadata, flavor)
}
