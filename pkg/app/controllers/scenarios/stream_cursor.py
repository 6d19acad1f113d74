import logging

from app.exceptions import ExemplarAccessError, InvalidDataError
from app.models.stream import LabeledSet, TaskData, TaskStream

logger = logging.getLogger(__name__)


class StreamCursor:
    """The only way training data leaves a stream.

    Continual methods see the current task through `advance`/`current`; asking for an
    earlier task's training data raises. `union_train` exists for the joint upper bound.
    """

    def __init__(self, stream: TaskStream) -> None:
        self._stream = stream
        self._position = -1

    @property
    def position(self) -> int:
        return self._position

    def advance(self) -> TaskData:
        if self._position + 1 >= len(self._stream):
            raise InvalidDataError(f"Stream has only {len(self._stream)} tasks")
        self._position += 1
        logger.debug(f"Stream cursor moved to task {self._position}")
        return self._stream.tasks[self._position]

    @property
    def current(self) -> TaskData:
        if self._position < 0:
            raise InvalidDataError("Stream cursor has not been advanced yet")
        return self._stream.tasks[self._position]

    def train_data(self, task_id: int) -> LabeledSet:
        if task_id != self._position:
            raise ExemplarAccessError(
                f"Training data of task {task_id} requested while task {self._position} is current",
                requested=task_id,
                current=self._position,
            )
        return self._stream.tasks[task_id].train

    def union_train(self) -> list[TaskData]:
        """Every task up to and including the current one (joint training only)."""
        if self._position < 0:
            raise InvalidDataError("Stream cursor has not been advanced yet")
        return list(self._stream.tasks[: self._position + 1])
