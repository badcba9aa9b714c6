#include "json_positions.hpp"

#include <cctype>
#include <stdexcept>

namespace cssd::detail {

namespace {

class Indexer {
public:
    explicit Indexer(std::string_view text) : text_(text) {}

    std::map<std::string, TextPosition> run() {
        skip_ws();
        value("");
        return std::move(out_);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    std::map<std::string, TextPosition> out_;

    char peek() const {
        if (pos_ >= text_.size()) throw std::runtime_error("eof");
        return text_[pos_];
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
    }

    void expect(char c) {
        if (peek() != c) throw std::runtime_error("unexpected character");
        advance();
    }

    std::string string() {
        expect('"');
        std::string s;
        while (peek() != '"') {
            if (peek() == '\\') {
                advance();
                s.push_back(peek());
                advance();
                continue;
            }
            s.push_back(peek());
            advance();
        }
        advance();
        return s;
    }

    void value(const std::string& path) {
        out_[path] = {line_, column_};
        const char c = peek();
        if (c == '{') {
            advance();
            skip_ws();
            if (peek() == '}') return advance();
            for (;;) {
                skip_ws();
                const std::string key = string();
                skip_ws();
                expect(':');
                skip_ws();
                value(path.empty() ? key : path + "." + key);
                skip_ws();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                return expect('}');
            }
        }
        if (c == '[') {
            advance();
            skip_ws();
            if (peek() == ']') return advance();
            for (std::size_t i = 0;; ++i) {
                skip_ws();
                value(path + "[" + std::to_string(i) + "]");
                skip_ws();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                return expect(']');
            }
        }
        if (c == '"') {
            string();
            return;
        }
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            advance();
        }
    }
};

}  // namespace

std::map<std::string, TextPosition> index_json_positions(std::string_view text) {
    try {
        return Indexer(text).run();
    } catch (const std::runtime_error&) {
        return {};
    }
}

}  // namespace cssd::detail
