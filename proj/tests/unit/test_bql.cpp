#include <string>

#include "ast_gen.hpp"
#include "doctest.h"
#include "polydawg/bql/lexer.hpp"
#include "polydawg/bql/parser.hpp"
#include "polydawg/bql/render.hpp"
#include "polydawg/error.hpp"

using namespace polydawg;
using namespace polydawg::bql;

namespace {

const char* kRelLimit = "bdrel(select * from mimic2v26.d_patients limit 4)";
const char* kArrayFilter = "bdarray(filter(myarray,dim1>150))";
const char* kTextRange =
    "bdtext({ 'op' : 'scan', 'table' : 'mimic_logs', 'range' : { 'start' : ['r_0001','',''], "
    "'end' : ['r_0015','','']} })";
const char* kCatalog = "bdcatalog(objects)";
const char* kCastChain = R"q(bdarray(
  scan(
    bdcast(
      bdrel(SELECT poe_id, subject_id FROM mimic2v26.poe_order LIMIT 5)
      , poe_order_copy
      , '<subject_id:int32>[poe_id=0:*,10000000,0]'
      , array))))q";

ErrorCode code_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error for " << text);
  return ErrorCode::SyntaxError;
}

std::size_t offset_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    REQUIRE(e.offset().has_value());
    return *e.offset();
  }
  FAIL("expected an error for " << text);
  return 0;
}

}  // namespace

TEST_SUITE("bql") {
  TEST_CASE("tokenize basics") {
    auto toks = tokenize("bdrel(select 1)");
    REQUIRE(toks.size() == 6);
    CHECK(toks[0].kind == TokenKind::Ident);
    CHECK(toks[0].text == "bdrel");
    CHECK(toks[1].kind == TokenKind::LParen);
    CHECK(toks[2].text == "select");
    CHECK(toks[3].kind == TokenKind::Integer);
    CHECK(toks[3].offset == 13);
    CHECK(toks[4].kind == TokenKind::RParen);
    CHECK(toks[5].kind == TokenKind::End);

    auto text = tokenize("bdtext({ 'op' : 'scan'})");
    CHECK(text[2].kind == TokenKind::LBrace);
    CHECK(text[3].kind == TokenKind::String);
    CHECK(text[3].text == "op");

    CHECK_THROWS_AS(tokenize("bdrel('abc"), Error);
    try {
      tokenize("bdrel('abc");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnterminatedString);
      CHECK(e.offset() == 6u);
    }
    try {
      tokenize("bdrel(select # from t)");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IllegalCharacter);
      CHECK(e.offset() == 13u);
    }
  }

  TEST_CASE("documented examples parse") {
    for (const char* q : {kRelLimit, kArrayFilter, kTextRange, kCatalog, kCastChain}) {
      CAPTURE(q);
      CHECK_NOTHROW(parse(q));
    }
  }

  TEST_CASE("relational limit query structure") {
    Ast ast = parse(kRelLimit);
    const auto& q = std::get<IslandQuery>(ast.node);
    CHECK(q.island() == Island::Relational);
    const auto& s = std::get<RelationalSelect>(q.body);
    CHECK(s.star);
    REQUIRE(s.from.size() == 1);
    CHECK(s.from[0].object_name() == "mimic2v26.d_patients");
    CHECK(s.limit == 4);
  }

  TEST_CASE("array filter structure") {
    const Ast ast = parse(kArrayFilter);
    const auto& q = std::get<IslandQuery>(ast.node);
    const auto& f = std::get<ArrayFilter>(std::get<ArrayExpr>(q.body).node);
    CHECK(std::get<ArrayRef>(f.input->node).source == ObjectSource{std::string("myarray")});
    CHECK(f.predicate == Expr::make_binary(">", Expr::make_column("", "dim1"),
                                           Expr::make_literal(Value(std::int32_t{150}))));
  }

  TEST_CASE("text range structure") {
    const Ast ast = parse(kTextRange);
    const auto& q = std::get<IslandQuery>(ast.node);
    const auto& t = std::get<TextQuery>(q.body);
    CHECK(t.op == TextOp::Scan);
    CHECK(std::get<std::string>(t.table) == "mimic_logs");
    REQUIRE(t.range);
    CHECK(*t.range->start == TextBound{"r_0001", "", ""});
    CHECK(*t.range->end == TextBound{"r_0015", "", ""});

    const Ast min_ast = parse("bdtext({'op':'scan','table':'t'})");
    const auto& minimal = std::get<TextQuery>(std::get<IslandQuery>(min_ast.node).body);
    CHECK_FALSE(minimal.range);
    CHECK(code_of("bdtext({'table':'t'})") == ErrorCode::MissingKey);
    CHECK(code_of("bdtext({'op':'seek','table':'t'})") == ErrorCode::UnknownTextOperator);
    CHECK(code_of("bdtext({\"op\":'scan','table':'t'})") == ErrorCode::SyntaxError);
    CHECK(code_of("bdtext({'op':'range','table':'t'})") == ErrorCode::MissingKey);
  }

  TEST_CASE("cast chain structure") {
    const Ast ast = parse(kCastChain);
    const auto& q = std::get<IslandQuery>(ast.node);
    const auto& scan = std::get<ArrayScan>(std::get<ArrayExpr>(q.body).node);
    const auto& cast = std::get<CastLeaf>(std::get<ArrayRef>(scan.input->node).source);
    CHECK(cast.intermediate_name == "poe_order_copy");
    CHECK(cast.dest_island == Island::Array);
    const auto& schema = std::get<ArraySchema>(cast.dest_schema);
    REQUIRE(schema.attributes.size() == 1);
    CHECK(schema.attributes[0] == AttributeDesc{"subject_id", ScalarType::Int32});
    REQUIRE(schema.dimensions.size() == 1);
    CHECK(schema.dimensions[0].name == "poe_id");
    CHECK(schema.dimensions[0].low == 0);
    CHECK_FALSE(schema.dimensions[0].high);
    CHECK(schema.dimensions[0].chunk == 10000000);
    CHECK(schema.dimensions[0].overlap == 0);
    const auto& inner = std::get<RelationalSelect>(cast.inner->body);
    CHECK(inner.limit == 5);
    CHECK(inner.projections.size() == 2);
  }

  TEST_CASE("catalog forms") {
    auto cq = [](const char* text) { return std::get<CatalogQuery>(parse(text).node); };
    CHECK(cq("bdcatalog(objects)").table == "objects");
    CHECK(cq("bdcatalog(objects)").columns.empty());
    CHECK(cq("bdcatalog(engines, name, port)").columns == std::vector<std::string>{"name", "port"});
    CHECK(cq("bdcatalog(engines name)").columns == std::vector<std::string>{"name"});
    auto q = cq("bdcatalog(select name from engines where port = 5400)");
    CHECK(q.table == "engines");
    REQUIRE(q.filter);
    CHECK(q.filter->column == "port");
    CHECK(same_value(q.filter->value, Value(std::int64_t{5400})));
    CHECK(code_of("bdrel(select * from bdcatalog(objects))") == ErrorCode::MisplacedCatalog);
    CHECK(code_of("bdcatalog(bdrel(select * from t))") == ErrorCode::MisplacedCatalog);
  }

  TEST_CASE("relational clauses") {
    const auto s = parse_relational_body("select a+1 as b from t order by b desc limit 2");
    REQUIRE(s.projections.size() == 1);
    CHECK(s.projections[0].expr ==
          Expr::make_binary("+", Expr::make_column("", "a"),
                            Expr::make_literal(Value(std::int32_t{1}))));
    CHECK(s.projections[0].alias == "b");
    REQUIRE(s.order_by.size() == 1);
    CHECK(s.order_by[0].descending);
    CHECK(s.limit == 2);

    const auto g = parse_relational_body("select count(*) from t group by c");
    CHECK(g.is_grouped());
    CHECK(g.group_by.size() == 1);

    const auto k = parse_relational_body("SeLeCt DISTINCT x FROM t AS u WHERE x IS NOT NULL");
    CHECK(k.distinct);
    CHECK(k.from[0].alias == "u");
    CHECK(k.where->kind == Expr::Kind::IsNull);
    CHECK(k.where->negated);
  }

  TEST_CASE("relational rejections") {
    CHECK(code_of("bdrel(select * from (select a from t))") == ErrorCode::UnsupportedSqlFeature);
    CHECK(code_of("bdrel(select a from t group by a having count(*) > 1)") ==
          ErrorCode::UnsupportedSqlFeature);
    CHECK(code_of("bdrel(select a from t join u on a = b)") == ErrorCode::UnsupportedSqlFeature);
    CHECK(code_of("bdrel(select a, count(*) from t group by b)") == ErrorCode::InvalidGrouping);
    CHECK(code_of("bdrel(select a from t where count(*) > 1)") == ErrorCode::InvalidGrouping);
    CHECK(code_of("bdrel(select a from t limit -1)") == ErrorCode::SyntaxError);
    CHECK(code_of("bdfoo(select a from t)") == ErrorCode::UnknownFunctionToken);
    CHECK(code_of("bdcast(bdrel(select a from t), x, '(a int)', relational)") ==
          ErrorCode::MisplacedCast);
    CHECK(code_of("bdarray(bdcast(bdrel(select a from t), x, '<a:int32>[i=0:*]', array))") ==
          ErrorCode::MisplacedCast);
  }

  TEST_CASE("array operators") {
    auto body = [](const char* t) { return parse_array_body(t); };
    const auto p = std::get<ArrayProject>(body("project(myarray,val)").node);
    CHECK(p.attributes == std::vector<std::string>{"val"});
    const auto s = std::get<ArraySort>(body("sort(myarray,val)").node);
    CHECK(s.attributes == std::vector<std::string>{"val"});
    const auto a = std::get<ArrayAggregate>(body("aggregate(A, sum(v) as total, count(*), i)").node);
    REQUIRE(a.calls.size() == 2);
    CHECK(a.calls[0].output_name() == "total");
    CHECK(a.calls[1].output_name() == "count");
    CHECK(a.group_dims == std::vector<std::string>{"i"});
    const auto j = std::get<ArrayCrossJoin>(body("cross_join(A as l, B as r, l.i, r.j)").node);
    CHECK(j.left_alias == "l");
    REQUIRE(j.pairs.size() == 1);
    CHECK(j.pairs[0].first == DimRef{"l", "i"});
    const auto r = std::get<ArrayRedimension>(body("redimension(A, <v:int64>[w=0:9,10,0])").node);
    CHECK(std::get<ArraySchema>(r.target).dimensions[0].name == "w");

    CHECK(code_of("bdarray(between(myarray,1,2))") == ErrorCode::UnknownArrayOperator);
    CHECK(code_of("bdarray(scan(a, b))") == ErrorCode::ArityError);
    CHECK(code_of("bdarray(filter(a))") == ErrorCode::ArityError);
    CHECK(code_of("bdarray(project(a))") == ErrorCode::ArityError);
  }

  TEST_CASE("array schemas") {
    const auto s = parse_array_schema("<a:int32,b:string>[i=0:9,10,0,j=0:9,10,0]");
    CHECK(s.attributes.size() == 2);
    CHECK(s.attributes[1].type == ScalarType::String);
    CHECK(s.dimensions.size() == 2);
    CHECK(s.dimensions[1].high == 9);
    auto schema_code = [](const char* text) {
      try {
        parse_array_schema(text);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::InvalidArgument;
    };
    CHECK(schema_code("<a:int32>[i=5:2,1,0]") == ErrorCode::BadBounds);
    CHECK(schema_code("<a:int32>[a=0:2,1,0]") == ErrorCode::DuplicateName);
    CHECK(schema_code("<a:blob>[i=0:2,1,0]") == ErrorCode::SchemaSyntaxError);
    CHECK(schema_code("<a:int32>[i=0:2,0,0]") == ErrorCode::BadBounds);

    const auto rel = parse_relational_schema("(poe_id int, dose double precision, name varchar(20))");
    REQUIRE(rel.columns.size() == 3);
    CHECK(rel.columns[1].type == ScalarType::Double);
    CHECK(rel.columns[2].type == ScalarType::String);
    CHECK(parse_text_schema("subject_id").key_column == "subject_id");
  }

  TEST_CASE("error offsets stay inside the query") {
    for (const std::string q :
         {"bdrel(", "bdrel(select", "bdarray(filter(myarray,dim1>))", "bdtext({'op':})", "",
          "bdcatalog(", "bdarray(scan(bdcast(bdrel(select a from t), x, '<a:int32>[i=5:1]', array)))"}) {
      CAPTURE(q);
      CHECK(offset_of(q) <= q.size());
    }
    CHECK(offset_of("bdrel(select a frm t)") == 19u);  // `frm` reads as an alias
  }

  TEST_CASE("render canonical forms") {
    CHECK(render(parse("bdarray(scan(myarray))")) == "bdarray(scan(myarray))");
    CHECK(render(parse_array_schema("<subject_id:int32>[poe_id=0:*,10000000,0]")) ==
          "<subject_id:int32>[poe_id=0:*,10000000,0]");
  }

  TEST_CASE("documented examples round-trip") {
    for (const char* q : {kRelLimit, kArrayFilter, kTextRange, kCatalog, kCastChain}) {
      CAPTURE(q);
      const Ast ast = parse(q);
      const std::string text = render(ast);
      CHECK(parse(text) == ast);
      CHECK(render(parse(text)) == text);
    }
  }

  TEST_CASE("generated ASTs round-trip") {
    testgen::AstGenerator gen(20240611);
    for (int i = 0; i < 2000; ++i) {
      const Ast ast = gen.query();
      const std::string text = render(ast);
      CAPTURE(text);
      Ast back;
      REQUIRE_NOTHROW(back = parse(text));
      CHECK(back == ast);
    }
  }

  TEST_CASE("literal stripping") {
    const auto a = render(parse("bdrel(select * from t where x > 4 limit 4)"), {true});
    const auto b = render(parse("bdrel(select * from t where x > 9 limit 9)"), {true});
    CHECK(a == b);
    CHECK(a.find('4') == std::string::npos);
  }
}
