from typing import List

import numpy as np

from src.domain.entities.maze import Maze, SceneObject
from src.domain.repositories.scene_repository import SceneRepository
from src.infrastructure.persistence.files import (
    FORMAT_VERSION, DatasetLayout, atomic_write_json, check_version, read_json
)


class FileSceneRepository(SceneRepository):
    """JSON implementation of SceneRepository (``scenes/<id>.json``)."""

    def __init__(self, root: str):
        self.layout = DatasetLayout(root)

    def _to_item(self, maze: Maze) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "id": maze.id,
            "width": maze.width,
            "height": maze.height,
            "cell_size": maze.cell_size,
            "wall_texture_seed": maze.wall_texture_seed,
            "cells": ["".join("#" if wall else "." for wall in row) for row in maze.cells],
            "objects": [
                {"id": o.object_id, "cx": o.cx, "cy": o.cy, "appearance_seed": o.appearance_seed}
                for o in maze.objects
            ]
        }

    def _from_item(self, item: dict, path) -> Maze:
        check_version(item, path)
        rows = item["cells"]
        if len(rows) != item["height"] or any(len(r) != item["width"] for r in rows):
            raise ValueError(f"{path}: cell rows do not match {item['width']}x{item['height']}")
        cells = np.array([[ch == "#" for ch in row] for row in rows], dtype=bool)
        objects = [
            SceneObject(object_id=o["id"], cx=o["cx"], cy=o["cy"], appearance_seed=o["appearance_seed"])
            for o in item["objects"]
        ]
        return Maze(
            id=item["id"],
            cells=cells,
            objects=objects,
            wall_texture_seed=item["wall_texture_seed"],
            cell_size=item["cell_size"]
        )

    def save(self, maze: Maze) -> str:
        path = self.layout.scene(maze.id)
        atomic_write_json(path, self._to_item(maze))
        return str(path)

    def get(self, scene_id: str) -> Maze:
        path = self.layout.scene(scene_id)
        return self._from_item(read_json(path), path)

    def exists(self, scene_id: str) -> bool:
        return self.layout.scene(scene_id).is_file()

    def list_ids(self) -> List[str]:
        directory = self.layout.root / "scenes"
        if not directory.is_dir():
            return []
        return sorted(p.stem for p in directory.glob("*.json"))
