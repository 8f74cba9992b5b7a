//! Golden tests over the documented example listings of the text format.

use nqasm_core::asm::{self, print_symbolic, resolve_labels};
use nqasm_core::isa::Flavor;

/// The loop/if program written with branch variables.
const BRANCH_VARIABLES_SRC: &str = "\
# NETQASM 1.0
# APPID 0
set R0 0

// Loop entry
LOOP:
beq R0 10 LOOP_EXIT

// Loop body
// If statement
bge R0 5 ELSE
// true block
add R0 R0 1
jmp IF_EXIT
// false block
ELSE:
add R0 R0 2
IF_EXIT:

// Loop exit
jmp LOOP
LOOP_EXIT:
";

const BRANCH_VARIABLES_RESOLVED: &str = "\
# NETQASM 1.0
# APPID 0
set R0 0
beq R0 10 7
bge R0 5 5
add R0 R0 1
jmp 6
add R0 R0 2
jmp 1
";

#[test]
fn branch_label_replacement_golden() {
    let sym = asm::parse_text(BRANCH_VARIABLES_SRC, Flavor::Vanilla).unwrap();
    let resolved = resolve_labels(&sym).unwrap();
    assert_eq!(print_symbolic(&resolved), BRANCH_VARIABLES_RESOLVED);
    // branch-target immediates are exactly 7, 5, 6, 1
    let targets: Vec<i32> = resolved
        .items
        .iter()
        .filter_map(|item| {
            item.instruction
                .instruction_branch_target()
        })
        .collect();
    assert_eq!(targets, vec![7, 5, 6, 1]);
}

trait BranchTarget {
    fn instruction_branch_target(&self) -> Option<i32>;
}

impl BranchTarget for nqasm_core::asm::SymbolicInstruction {
    fn instruction_branch_target(&self) -> Option<i32> {
        let pos = self.opcode.branch_target_index()?;
        match self.operands[pos] {
            nqasm_core::asm::SymOperand::Immediate(v) => Some(v),
            _ => None,
        }
    }
}

/// Full resolution also lowers the comparison immediates through `set`,
/// shifting the label indices accordingly.
#[test]
fn branch_program_full_resolution_is_lowered() {
    let resolved = asm::assemble_text(BRANCH_VARIABLES_SRC, Flavor::Vanilla).unwrap();
    // beq 10, bge 5, add 1, add 2
    assert_eq!(resolved.sets_inserted, 4);
    assert_eq!(resolved.subroutine.len(), 11);
    resolved.subroutine.check().unwrap();
}

const HADAMARD_MEASURE_SRC: &str = "\
# NETQASM 1.0
# APPID 0
// Set the virtual qubit ID to use
set Q0 0

// Allocate and initialize a qubit
qalloc Q0
init Q0

// Perform a Hadamard gate
h Q0

// Measure the qubit
meas Q0 M0

// Return the outcome
ret_reg M0
";

#[test]
fn hadamard_measure_roundtrip_is_fixpoint() {
    let resolved = asm::assemble_text(HADAMARD_MEASURE_SRC, Flavor::Vanilla).unwrap();
    assert_eq!(resolved.sets_inserted, 0);
    let text1 = asm::print_subroutine(&resolved.subroutine);
    let again = asm::assemble_text(&text1, Flavor::Vanilla).unwrap();
    let text2 = asm::print_subroutine(&again.subroutine);
    assert_eq!(text1, text2);
    assert_eq!(resolved.subroutine, again.subroutine);
}

#[test]
fn for_loop_listing_lowers_two_sets() {
    let src = "\
# NETQASM 1.0
# APPID 0
# DEFINE ms @0
# DEFINE i R0
# DEFINE q Q0
# DEFINE m M0
// Create an array with 10 entries (all null)
array 10 $ms

// Initialize loop counter
set $i 0

// Set the virtual qubit ID to use
set $q 0

// Loop entry
LOOP:
beq $i 10 EXIT

// Loop body
qalloc $q
init $q
h $q
meas $q $m
store $m $ms[$i]
qfree $q
add $i $i 1

// Loop exit
jmp LOOP
EXIT:
";
    let resolved = asm::assemble_text(src, Flavor::Vanilla).unwrap();
    assert_eq!(resolved.sets_inserted, 2);
    assert_eq!(resolved.leas_inserted, 0);
    resolved.subroutine.check().unwrap();
}

#[test]
fn epr_create_listing_assembles() {
    let src = "\
# NETQASM 1.0
# APPID 0
# DEFINE qubits @0
# DEFINE args @1
# DEFINE entinfo @2
// Initializer side

array 1 $qubits
store 0 $qubits[0]
array 20 $args
array 10 $entinfo

// Remote node ID 1 and EPR socket ID 0
create_epr 1 0 $qubits $args $entinfo
wait_all $entinfo[0:10]

load Q0 $qubits[0]
meas Q0 M0
ret_reg M0
";
    let resolved = asm::assemble_text(src, Flavor::Vanilla).unwrap();
    // store value 0 (1 set) + entry index (1 set) + create_epr ids (2 sets)
    // + slice bounds (2 sets) + entry index of load (1 set)
    assert_eq!(resolved.sets_inserted, 7);
    // three array operands of create_epr
    assert_eq!(resolved.leas_inserted, 3);
    let text = asm::print_subroutine(&resolved.subroutine);
    assert!(text.contains("create_epr R15 R14 R13 R12 R11"));
}
