"""Source-level rendering of open proof goals."""

from .heapmap import HeapMap, NotRenderable, build_heap_map
from .positioning import assert_gap, assume_gap, blocks_down, blocks_up, gap_placement
from .retranslate import RenderCtx, Untranslatable, inline_pullouts, retranslate
from .view import (
    GoalView, InlineAnnotation, classify_formula, executed_lines, goal_view,
    position_annotations, render_sequent,
)
