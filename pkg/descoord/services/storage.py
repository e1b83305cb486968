from __future__ import annotations

import asyncio
import contextlib
import logging
import os
from pathlib import Path
from typing import Iterable, List, Union

from aiofiles import open as aioopen

from descoord.automata import Generator
from descoord.errors import GeneratorFileError
from descoord.genfile import parse_generator, serialize_generator

LOGGER = logging.getLogger(__name__)

PathLike = Union[str, Path]


class GeneratorStore:
    """Reads ``.gen`` files and writes results atomically.

    Relative paths are resolved against ``root``.
    """

    def __init__(self, root: PathLike = ".") -> None:
        self._root = Path(root)

    def resolve(self, path: PathLike) -> Path:
        candidate = Path(path)
        return candidate if candidate.is_absolute() else self._root / candidate

    async def read_text(self, path: PathLike) -> str:
        async with aioopen(self.resolve(path), "r", encoding="utf-8") as file:
            return await file.read()

    async def load(self, path: PathLike) -> Generator:
        resolved = self.resolve(path)
        text = await self.read_text(resolved)
        try:
            generator = parse_generator(text)
        except GeneratorFileError:
            LOGGER.error("generator_load_failed", extra={"path": str(resolved)})
            raise
        LOGGER.info(
            "generator_loaded",
            extra={"path": str(resolved), "states": len(generator), "name": generator.name},
        )
        return generator

    async def load_many(self, paths: Iterable[PathLike]) -> List[Generator]:
        return list(await asyncio.gather(*(self.load(path) for path in paths)))

    async def save(self, path: PathLike, generator: Generator) -> Path:
        return await self.write_text(path, serialize_generator(generator))

    async def write_text(self, path: PathLike, payload: str) -> Path:
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)

        if target.suffix:
            tmp_path = target.with_suffix(target.suffix + ".tmp")
        else:
            tmp_path = target.with_name(target.name + ".tmp")

        try:
            async with aioopen(tmp_path, "w", encoding="utf-8") as file:
                await file.write(payload)
                await file.flush()
            await asyncio.to_thread(os.replace, tmp_path, target)
        except Exception:
            with contextlib.suppress(FileNotFoundError):
                await asyncio.to_thread(tmp_path.unlink)
            raise

        LOGGER.debug("output_written", extra={"path": str(target)})
        return target
