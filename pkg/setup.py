"""
语料审计工具安装配置文件
支持pip安装和打包分发
"""

from setuptools import setup, find_packages
from pathlib import Path

# 读取README文件
this_directory = Path(__file__).parent
readme_file = this_directory / "README.md"
long_description = readme_file.read_text(encoding='utf-8') if readme_file.exists() else ""

RUNTIME_PACKAGES = ("numpy", "PyYAML", "datasketch", "psutil")


# 读取requirements.txt，只保留运行时依赖
def read_requirements():
    requirements_file = this_directory / "requirements.txt"
    if not requirements_file.exists():
        return []
    with open(requirements_file, 'r', encoding='utf-8') as f:
        lines = [line.strip() for line in f if line.strip() and not line.startswith('#')]
    return [line for line in lines if line.startswith(RUNTIME_PACKAGES)]


# 读取版本信息
def get_version():
    namespace = {}
    version_file = this_directory / "version.py"
    if version_file.exists():
        exec(version_file.read_text(encoding='utf-8'), namespace)
        return namespace['__version__']
    return "1.0.0"


setup(
    name="corpus-audit",
    version=get_version(),
    author="Corpus Audit Team",
    description="社交媒体文本分类语料的重复、近重复、标签冲突与划分泄漏审计工具",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests", "tests.*", "examples", "examples.*")),
    py_modules=["main", "version"],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Intended Audience :: Developers",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Text Processing :: Linguistic",
    ],
    python_requires=">=3.8",
    install_requires=read_requirements(),
    extras_require={
        "dev": [
            "pytest>=6.0",
            "pytest-cov>=2.0",
            "hypothesis>=6.0",
            "black>=21.0",
            "flake8>=3.8",
        ],
    },
    entry_points={
        "console_scripts": [
            "corpus-audit=main:main",
        ],
    },
    include_package_data=True,
    package_data={
        "config": ["*.yaml"],
    },
    zip_safe=False,
    keywords=[
        "corpus audit",
        "deduplication",
        "near duplicates",
        "edit distance",
        "label noise",
        "train test leakage",
        "social media",
    ],
)
