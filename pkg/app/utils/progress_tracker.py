"""
Progress tracking utilities for exhaustive searches
"""
from typing import Optional
from enum import Enum
import logging

logger = logging.getLogger(__name__)


class SearchStage(str, Enum):
    """Brute-force search stages"""
    ORBIT_TABLE = "orbit_table"
    SUMSET = "sumset"
    WITNESS_CHECK = "witness_check"
    COMPLETE = "complete"


class ProgressTracker:
    """Track search progress and log it with percentages"""

    # Stage weight distribution (total = 100%)
    STAGE_WEIGHTS = {
        SearchStage.ORBIT_TABLE: 30,
        SearchStage.SUMSET: 60,
        SearchStage.WITNESS_CHECK: 5,
        SearchStage.COMPLETE: 5,
    }

    def __init__(self, label: str):
        self.label = label
        self.current_stage = SearchStage.ORBIT_TABLE
        self.total_steps = 0
        self.completed_steps = 0

    def get_stage_start_percentage(self, stage: SearchStage) -> int:
        """Get the starting percentage for a given stage"""
        start = 0
        for s in SearchStage:
            if s == stage:
                break
            start += self.STAGE_WEIGHTS[s]
        return start

    def calculate_progress(self) -> int:
        base_progress = self.get_stage_start_percentage(self.current_stage)
        if self.current_stage == SearchStage.SUMSET and self.total_steps > 0:
            step_progress = (self.completed_steps / self.total_steps) * self.STAGE_WEIGHTS[SearchStage.SUMSET]
            return int(base_progress + step_progress)
        return base_progress

    def set_stage(self, stage: SearchStage, message: Optional[str] = None) -> None:
        """Set current stage and log milestone"""
        self.current_stage = stage
        self.completed_steps = 0
        if message:
            logger.info(f"📍 MILESTONE [{self.label}]: {message} ({self.calculate_progress()}%)")

    def increment(self, current: int, total: int, message: Optional[str] = None) -> None:
        self.completed_steps = current
        self.total_steps = total
        log_message = message or f"step {current}/{total}"
        logger.debug(f"📦 PROGRESS [{self.label}]: {log_message} ({self.calculate_progress()}%)")

    def complete_stage(self, stage: SearchStage, message: Optional[str] = None) -> None:
        """Mark a stage as complete"""
        progress = self.get_stage_start_percentage(stage) + self.STAGE_WEIGHTS[stage]
        if message:
            logger.info(f"✅ COMPLETE [{self.label}]: {message} ({progress}%)")
