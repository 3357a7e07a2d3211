from setuptools import setup, find_namespace_packages

setup(
    name="conedual",
    version="1.0.0",
    packages=find_namespace_packages(include=["conedual", "conedual.*"]),
    package_data={"conedual": ["schemas/*.json"]},
    license="MIT",
    python_requires=">=3.9",
    install_requires=["numpy", "scipy", "python-dotenv"],
    entry_points={"console_scripts": ["conedual=conedual.cli:main"]},
)
