"""History-deterministic timed automata toolkit.

Region abstraction, timed-game solving, fair-simulation based inclusion,
history-determinism checking with resolver extraction, region-guard
determinization and controller synthesis, all over exact rationals.
"""

from .ta import (
    Acceptance,
    AcceptanceKind,
    Configuration,
    Guard,
    GuardAtom,
    InputError,
    Lasso,
    Rel,
    TimedAutomaton,
    Transition,
    UnsupportedError,
    WitnessRealizationError,
    as_parity,
    atom,
    delay,
    discrete_successors,
    eval_guard,
    guard,
    initial_configuration,
    is_trivially_accepting,
    product_intersection,
    reduced_run_tree,
    validate,
)
from .analysis import (
    EmptinessResult,
    InclusionResult,
    SimulationVerdict,
    distinguishing_play,
    fair_simulation,
    language_emptiness,
    language_inclusion_hd,
    member_lasso,
    sample_accepted_lassos,
    universal_automaton,
    universality_hd,
)
from .countdown import CountdownInstance, dp_player1_wins, gen_countdown
from .determinize import determinize_hd
from .hd import (
    G1Arena,
    HDResult,
    RegionResolver,
    almost_final_regions,
    analyze_hd,
    check_hd,
    extract_resolver,
    g1_arena,
)
from .parity import GameArena, ParityResult, Player, solve_parity, verify_strategy
from .regions import (
    Region,
    build_region_graph,
    delay_chain,
    enumerate_regions,
    region_guard,
    region_of,
    region_reset,
    region_satisfies,
    time_successor,
    zero_region,
)
from .synthesis import (
    Controller,
    SynthesisResult,
    delta_annotate,
    solve_synthesis,
    split_letter,
)
from .timed_games import (
    CompiledTimedGame,
    Move,
    TimedGame,
    TimedGameResult,
    compile_timed_game,
    compose,
    solve_timed_game,
)

__version__ = "0.1.0"
