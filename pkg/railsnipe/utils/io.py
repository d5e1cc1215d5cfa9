import json
import logging
import os

logger = logging.getLogger(__name__)


def save_text_file(content: str, output_path: str):
    """
    Saves string content to a UTF-8 text file, creating parent directories.

    Raises:
        OSError: If the file cannot be written to the specified path.
    """
    try:
        directory = os.path.dirname(output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)

        # newline="" keeps the "\n" terminators byte-identical across platforms
        with open(output_path, "w", encoding="utf-8", newline="") as f:
            f.write(content)
        logger.info(f"Successfully saved to {output_path}")

    except OSError:
        logger.error(f"Error: Could not write to file at {output_path}")
        raise


def save_json(document: dict, output_path: str):
    save_text_file(json.dumps(document, indent=2) + "\n", output_path)


def read_text_file(file_path: str) -> str:
    """
    Reads a UTF-8 text file.

    Raises:
        FileNotFoundError: If the file does not exist.
    """
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return f.read()
    except FileNotFoundError:
        logger.error(f"Error: File not found at {file_path}")
        raise


def load_json(file_path: str) -> dict:
    return json.loads(read_text_file(file_path))
