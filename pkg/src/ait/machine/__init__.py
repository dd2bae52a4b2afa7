from .encoding import (
    EncodingError,
    UniversalFormatError,
    decode_machine,
    encode_machine,
    encoding_by_index,
    index_of_encoding,
    index_of_machine,
    is_valid_encoding,
    machine_by_index,
    universal_program,
    universal_run,
)
from .selfdelim import SelfDelimRun, parse_selfdelim_machine, selfdelim_machine, selfdelim_run
from .tm import (
    BudgetExceeded,
    Halted,
    Machine,
    MachineFormatError,
    ProvenLooping,
    Rule,
    RunOutcome,
    parse_machine,
    run,
)
