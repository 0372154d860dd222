#include "monosil/image.hpp"

#include <fstream>

#include "monosil/errors.hpp"

namespace monosil::imaging
{

void write_pgm(const ImageGray &img, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open for writing: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char *>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

ImageGray read_pgm(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open for reading: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5")
        throw Error("not a binary PGM (P5): " + path);

    auto next_token = [&in, &path]() {
        std::string tok;
        // '#' starts a comment running to end of line
        while (in >> tok)
        {
            if (tok[0] == '#')
            {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw Error("truncated PGM header: " + path);
    };

    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (maxval != 255)
        throw Error("unsupported maxval (expect 255): " + path);
    in.get(); // single whitespace after maxval

    ImageGray img(w, h);
    in.read(reinterpret_cast<char *>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw Error("truncated PGM payload: " + path);
    return img;
}

} // namespace monosil::imaging
